"""Tokenizer behavior pinned against the WMT reference semantics."""

import random

from evoloop.metrics import normalize_13a, tokenize_13a


class TestExamples:
    def test_basic_punctuation(self):
        assert tokenize_13a("Hello, world!") == ["Hello", ",", "world", "!"]

    def test_empty_string(self):
        assert tokenize_13a("") == []

    def test_digit_keeps_period(self):
        assert tokenize_13a("3.5% drop") == ["3.5", "%", "drop"]

    def test_sentence_final_period_splits(self):
        assert tokenize_13a("It works.") == ["It", "works", "."]

    def test_comma_inside_number_joined(self):
        assert tokenize_13a("1,000,000 units") == ["1,000,000", "units"]

    def test_entity_unescaping(self):
        assert tokenize_13a("a &quot;b&quot; &amp; c") == ["a", '"', "b", '"', "&", "c"]
        assert tokenize_13a("&lt;tag&gt;") == ["<", "tag", ">"]

    def test_digit_dash_splits(self):
        assert tokenize_13a("a 10-fold rise") == ["a", "10", "-", "fold", "rise"]

    def test_letter_dash_joined(self):
        assert tokenize_13a("state-of-the-art") == ["state-of-the-art"]

    def test_skipped_marker_removed(self):
        assert tokenize_13a("a <skipped> b") == ["a", "b"]

    def test_newline_is_space(self):
        assert tokenize_13a("one\ntwo") == ["one", "two"]

    def test_hyphenated_linebreak_joins(self):
        assert tokenize_13a("frag-\nment") == ["fragment"]

    def test_brackets_and_symbols_split(self):
        assert tokenize_13a("(a) [b] {c}") == ["(", "a", ")", "[", "b", "]", "{", "c", "}"]

    def test_colon_semicolon_at_split(self):
        assert tokenize_13a("k:v; w@x") == ["k", ":", "v", ";", "w", "@", "x"]

    def test_unicode_letters_pass_through(self):
        assert tokenize_13a("Würde bleibt") == ["Würde", "bleibt"]

    def test_cjk_not_split(self):
        # 13a only handles ASCII-range symbol classes; CJK stays joined
        assert tokenize_13a("中文 tokens") == ["中文", "tokens"]


class TestProperties:
    def test_idempotent_on_own_output(self):
        rng = random.Random(11)
        words = ["Hello,", "world!", "3.5%", "a-b", "x;y", "&amp;", "(z)", "10-fold"]
        for _ in range(100):
            text = " ".join(rng.choice(words) for _ in range(rng.randint(0, 8)))
            once = normalize_13a(text)
            assert normalize_13a(once) == once

    def test_no_empty_tokens(self):
        rng = random.Random(12)
        pool = "ab ,.!?3-($:@é中\n\t"
        for _ in range(200):
            text = "".join(rng.choice(pool) for _ in range(rng.randint(0, 30)))
            assert all(tok for tok in tokenize_13a(text))

    def test_whitespace_only_is_empty(self):
        assert tokenize_13a(" \t \n ") == []
