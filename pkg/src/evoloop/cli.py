"""Command-line driver tying corpus, metrics, backends, and the loop together.

Config resolution: built-in defaults, then the --config JSON file, then
the EVOLOOP_WORKSPACE environment variable (workspace key only), then
command-line flags. Flags always win.

Exit codes are a stable contract: 0 success, 1 validation or domain
failure, 2 I/O or configuration failure.

Human-readable tables render at one decimal, matching the reporting
convention of the evaluation tables this tool feeds; JSON reports carry
full precision.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import re
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from .backends.cache import ContentCache
from .backends.clients import EndpointConfig, ScoreClient, TranslateClient, TtsClient
from .backends.mock import LookupTranslator
from .backends.transport import HttpTransport
from .corpus import Sample, iter_manifest, load_manifest, save_manifest
from .errors import (
    EvoloopError,
    MissingHypotheses,
    NoRounds,
)
from .evolution import (
    Backends,
    EvolutionConfig,
    RoundState,
    partition_and_emit,
    run_acquisition,
    run_refinement,
)
from .evolution.loop import run_loop
from .evolution.phases import _pick_audio  # shared audio-choice rule
from .metrics.aggregate import (
    DirectionScore,
    aggregate_by_resource,
    average_directions,
    round1,
)
from .metrics.bleu import corpus_spbleu
from .metrics.spm import load_piece_table
from .mockstack import DEFAULT_VOICE_POOL, build_mock_stack

log = logging.getLogger(__name__)


class UsageError(Exception):
    """Configuration or invocation problem; maps to exit code 2."""


# --- configuration -----------------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    workspace: str = "."
    endpoints: Dict[str, EndpointConfig] = field(default_factory=dict)
    evolution: EvolutionConfig = field(default_factory=EvolutionConfig)
    smoothing: str = "exp"
    piece_table_path: Optional[str] = None
    ratio_threshold: float = 0.6
    strict_manifests: bool = False
    update_hook: Optional[str] = None
    voices: Tuple[str, ...] = DEFAULT_VOICE_POOL
    token: Optional[str] = None
    mock: bool = False
    mock_schedule: Optional[Tuple[float, ...]] = None


def _endpoint_from_json(obj: dict) -> EndpointConfig:
    allowed = {"base_url", "timeout_s", "max_attempts", "backoff_base_ms", "max_in_flight"}
    unknown = set(obj) - allowed
    if unknown:
        raise UsageError(f"unknown endpoint config keys: {sorted(unknown)}")
    return EndpointConfig(**obj)


def load_run_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise UsageError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise UsageError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise UsageError("config file must hold a JSON object")
        try:
            endpoints = {
                name: _endpoint_from_json(spec)
                for name, spec in raw.get("endpoints", {}).items()
            }
            metrics = raw.get("metrics", {})
            cfg = RunConfig(
                workspace=raw.get("workspace", cfg.workspace),
                endpoints=endpoints,
                evolution=EvolutionConfig.from_json(raw.get("evolution", {})),
                smoothing=metrics.get("smoothing", cfg.smoothing),
                piece_table_path=metrics.get("piece_table_path"),
                ratio_threshold=metrics.get("ratio_threshold", cfg.ratio_threshold),
                strict_manifests=raw.get("strict_manifests", cfg.strict_manifests),
                update_hook=raw.get("update_hook"),
                voices=tuple(raw.get("voices", cfg.voices)),
                token=raw.get("token"),
            )
        except (TypeError, ValueError) as exc:
            raise UsageError(f"invalid config value: {exc}") from exc

    env_workspace = os.environ.get("EVOLOOP_WORKSPACE")
    if env_workspace:
        cfg = replace(cfg, workspace=env_workspace)

    if getattr(args, "workspace", None):
        cfg = replace(cfg, workspace=args.workspace)
    if getattr(args, "mock", False):
        cfg = replace(cfg, mock=True)
    if getattr(args, "strict", False):
        cfg = replace(cfg, strict_manifests=True)
    if getattr(args, "seed", None) is not None:
        cfg = replace(cfg, evolution=replace(cfg.evolution, seed=args.seed))
    if getattr(args, "piece_table", None):
        cfg = replace(cfg, piece_table_path=args.piece_table)
    if getattr(args, "voices", None):
        cfg = replace(cfg, voices=tuple(v for v in args.voices.split(",") if v))
    if getattr(args, "update_hook", None):
        cfg = replace(cfg, update_hook=args.update_hook)
    if getattr(args, "mock_schedule", None):
        try:
            schedule = tuple(float(x) for x in args.mock_schedule.split(","))
        except ValueError as exc:
            raise UsageError(f"bad --mock-schedule: {exc}") from exc
        cfg = replace(cfg, mock_schedule=schedule)

    for name in ("epsilon", "patience", "max_rounds", "eval_voice", "speech_source"):
        value = getattr(args, name, None)
        if value is not None:
            key = "fixed_eval_voice" if name == "eval_voice" else name
            try:
                cfg = replace(cfg, evolution=replace(cfg.evolution, **{key: value}))
            except ValueError as exc:
                raise UsageError(f"invalid --{name.replace('_', '-')}: {exc}") from exc
    return cfg


def _workspace(cfg: RunConfig) -> Path:
    ws = Path(cfg.workspace)
    try:
        ws.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UsageError(f"workspace not writable: {exc}") from exc
    return ws


def _lookup_outputs(samples: Sequence[Sample]) -> dict:
    """Mock translator table: speech-guided mode restores the trailing
    token that text-only mode drops, relative to the reference."""
    outputs = {}
    for sample in samples:
        outputs[("smt", sample.text)] = sample.reference
        head = " ".join(sample.reference.split()[:-1])
        outputs[("mt", sample.text)] = head or sample.reference
    return outputs


def build_stack(cfg: RunConfig, lookup_samples: Sequence[Sample] = ()):
    """Mock or HTTP backends behind the cached clients."""
    ws = _workspace(cfg)
    if cfg.mock:
        translator = None
        if cfg.mock_schedule is not None:
            translator = LookupTranslator(_lookup_outputs(lookup_samples))
        return build_mock_stack(
            str(ws), translator=translator, eval_schedule=cfg.mock_schedule
        )
    missing = [name for name in ("tts", "translate", "score")
               if name not in cfg.endpoints or not cfg.endpoints[name].base_url]
    if missing:
        raise UsageError(
            f"endpoints not configured: {', '.join(missing)} (or pass --mock)"
        )
    cache = ContentCache(ws / "cache")

    def transport(name: str) -> HttpTransport:
        ep = cfg.endpoints[name]
        return HttpTransport(ep.base_url, timeout_s=ep.timeout_s, token=cfg.token)

    from .mockstack import MockStack  # same container shape for both modes
    from .evolution.types import ModelVersion

    version = ModelVersion(0)
    backends = Backends(
        tts=TtsClient(transport("tts"), cache, config=cfg.endpoints["tts"]),
        translate=TranslateClient(
            transport("translate"), cache, config=cfg.endpoints["translate"],
            namespace=version.namespace,
        ),
        score=ScoreClient(
            transport("score"), cache, config=cfg.endpoints["score"],
            namespace=version.namespace,
        ),
    )
    return MockStack(
        backends=backends, version=version, cache=cache,
        tts_backend=None, translate_backend=None, score_backend=None,
    )


# --- rendering helpers --------------------------------------------------------

def fmt1(value: float, signed: bool = False) -> str:
    rounded = round1(value)
    return f"{rounded:+.1f}" if signed else f"{rounded:.1f}"


def _direction_str(direction: Tuple[str, str]) -> str:
    return f"{direction[0]}-{direction[1]}"


def write_report(ws: Path, name: str, payload: dict, override: Optional[str]) -> Path:
    path = Path(override) if override else ws / "reports" / f"{name}.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False, sort_keys=True, indent=2)
        fh.write("\n")
    return path


def _resource_lines(groups) -> List[str]:
    from .corpus import ResourceLevel

    order = {level: i for i, level in enumerate(ResourceLevel)}
    lines = ["resource     spBLEU / COMET"]
    for level in sorted(groups, key=order.__getitem__):
        sp, comet = groups[level]
        lines.append(f"{level.value:<12} {sp:.1f} / {comet:.1f}")
    return lines


def render_direction_table(rows: Sequence[DirectionScore]) -> List[str]:
    lines = ["direction    spBLEU / COMET"]
    for row in rows:
        name = _direction_str(row.direction)
        lines.append(f"{name:<12} {fmt1(row.spbleu)} / {fmt1(row.comet)}")
    avg_sp, avg_comet = average_directions(rows)
    lines.append(f"{'Avg':<12} {avg_sp:.1f} / {avg_comet:.1f}")
    return lines


# --- manifest/hypothesis plumbing ----------------------------------------------

def _load_samples(path: str, strict: bool) -> List[Sample]:
    try:
        return load_manifest(path, strict=strict)
    except FileNotFoundError as exc:
        raise UsageError(f"manifest not found: {path}") from exc


def _load_hypotheses(path: str) -> Dict[str, str]:
    """JSONL of {"id":..., "text":...} rows keyed by sample id."""
    hyps: Dict[str, str] = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                obj = json.loads(line)
                if not isinstance(obj, dict) or "id" not in obj or "text" not in obj:
                    raise MissingHypotheses(
                        f"{path}:{line_no}: rows need 'id' and 'text'"
                    )
                hyps[obj["id"]] = obj["text"]
    except FileNotFoundError as exc:
        raise MissingHypotheses(f"hypotheses file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise MissingHypotheses(f"{path}: invalid JSON: {exc}") from exc
    return hyps


def _direction_rows_from_file(path: str) -> List[DirectionScore]:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read direction scores: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"direction scores file is not valid JSON: {exc}") from exc
    rows = raw["rows"] if isinstance(raw, dict) else raw
    out = []
    for obj in rows:
        direction = tuple(obj["direction"])
        out.append(
            DirectionScore(
                direction=direction,
                spbleu=float(obj["spbleu"]),
                comet=float(obj["comet"]),
                n_samples=int(obj.get("n_samples", 1)),
            )
        )
    return out


# --- subcommands -----------------------------------------------------------------

def cmd_validate(args: argparse.Namespace) -> int:
    cfg = load_run_config(args)
    errors: List[Tuple[int, str]] = []
    count = 0
    try:
        for _line_no, _sample in _iter_with_errors(args.manifest, cfg.strict_manifests, errors):
            count += 1
    except FileNotFoundError as exc:
        raise UsageError(str(exc)) from exc
    for line_no, message in errors:
        print(f"line {line_no}: {message}")
    payload = {
        "command": "validate",
        "manifest": args.manifest,
        "n_samples": count,
        "errors": [{"line": n, "error": m} for n, m in errors],
    }
    if args.report:
        write_report(_workspace(cfg), "validate", payload, args.report)
    if errors:
        print(f"{count} valid, {len(errors)} invalid")
        return 1
    print(f"{count} samples OK")
    return 0


_LINE_PREFIX = re.compile(r"^line \d+: ")


def _iter_with_errors(path, strict, errors):
    """Per-line iteration that records errors instead of stopping."""
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                errors.append((line_no, f"invalid JSON: {exc.msg}"))
                continue
            from .corpus import sample_from_json
            try:
                if not isinstance(obj, dict):
                    raise EvoloopError("manifest line must be a JSON object")
                yield line_no, sample_from_json(obj, line_no=line_no, strict=strict)
            except EvoloopError as exc:
                errors.append((line_no, _LINE_PREFIX.sub("", str(exc))))


def cmd_synth(args: argparse.Namespace) -> int:
    cfg = load_run_config(args)
    ws = _workspace(cfg)
    samples = _load_samples(args.manifest, cfg.strict_manifests)
    stack = build_stack(cfg, samples)
    enriched = run_acquisition(
        samples, list(cfg.voices), cfg.evolution, stack.backends.tts
    )
    out = Path(args.out) if args.out else ws / "synth.jsonl"
    save_manifest(enriched, out)
    degraded = sum(1 for s in enriched if s.degraded)
    print(f"synthesized {len(enriched)} clips ({degraded} degraded) -> {out}")
    payload = {
        "command": "synth",
        "n_input": len(samples),
        "n_synthesized": len(enriched),
        "n_degraded": degraded,
        "manifest_out": str(out.name if out.parent == ws else out),
    }
    if args.report:
        write_report(ws, "synth", payload, args.report)
    return 0


def cmd_translate(args: argparse.Namespace) -> int:
    cfg = load_run_config(args)
    ws = _workspace(cfg)
    samples = _load_samples(args.manifest, cfg.strict_manifests)
    stack = build_stack(cfg, samples)
    mode = args.mode
    out = Path(args.out) if args.out else ws / f"hyp.{mode}.jsonl"
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8") as fh:
        for sample in samples:
            audio = None
            if mode == "smt":
                audio, _ = _pick_audio(sample, cfg.evolution.speech_source)
            hyp = stack.backends.translate.translate(
                mode, sample.text, audio, sample.direction
            )
            fh.write(json.dumps({"id": sample.id, "text": hyp.text}, ensure_ascii=False))
            fh.write("\n")
    print(f"translated {len(samples)} samples in {mode} mode -> {out}")
    payload = {
        "command": "translate",
        "mode": mode,
        "n": len(samples),
        "hypotheses": str(out.name if out.parent == ws else out),
    }
    if args.report:
        write_report(ws, "translate", payload, args.report)
    return 0


def cmd_score(args: argparse.Namespace) -> int:
    cfg = load_run_config(args)
    ws = _workspace(cfg)
    samples = _load_samples(args.manifest, cfg.strict_manifests)
    hyps = _load_hypotheses(args.hyp)
    missing = [s.id for s in samples if s.id not in hyps]
    if missing:
        raise MissingHypotheses(
            f"{len(missing)} sample(s) lack hypotheses, first: {missing[0]}"
        )
    stack = build_stack(cfg, samples)
    out = Path(args.out) if args.out else ws / "scores.jsonl"
    out.parent.mkdir(parents=True, exist_ok=True)
    values = []
    with open(out, "w", encoding="utf-8") as fh:
        for sample in samples:
            value = stack.backends.score.score(
                sample.text, hyps[sample.id], sample.reference
            )
            values.append(value)
            fh.write(json.dumps({"id": sample.id, "score": value}))
            fh.write("\n")
    mean = sum(values) / len(values) if values else 0.0
    print(f"scored {len(values)} hypotheses, mean {mean:.4f} -> {out}")
    payload = {
        "command": "score",
        "n": len(values),
        "mean_score": mean,
        "scores": str(out.name if out.parent == ws else out),
    }
    if args.report:
        write_report(ws, "score", payload, args.report)
    return 0


def cmd_classify(args: argparse.Namespace) -> int:
    cfg = load_run_config(args)
    ws = _workspace(cfg)
    samples = _load_samples(args.manifest, cfg.strict_manifests)
    stack = build_stack(cfg, samples)
    scored = run_refinement(
        samples, cfg.evolution, stack.backends.translate, stack.backends.score
    )
    out_dir = Path(args.out) if args.out else ws / "classify"
    result = partition_and_emit(scored, args.round_index, str(out_dir), workspace=str(ws))
    jobspec_path = out_dir / "jobspec.json"
    jobspec_path.parent.mkdir(parents=True, exist_ok=True)
    with open(jobspec_path, "w", encoding="utf-8") as fh:
        json.dump(
            result.jobspec.to_json() if result.jobspec else None,
            fh, ensure_ascii=False, sort_keys=True, indent=2,
        )
        fh.write("\n")
    print(f"positives={result.n_positive} negatives={result.n_negative}")
    if result.warning:
        print(f"warning: {result.warning}")
    payload = {
        "command": "classify",
        "n_positive": result.n_positive,
        "n_negative": result.n_negative,
        "positives": os.path.relpath(result.positives_path, ws),
        "negatives": os.path.relpath(result.negatives_path, ws),
        "jobspec": os.path.relpath(jobspec_path, ws),
        "warning": result.warning,
    }
    if args.report:
        write_report(ws, "classify", payload, args.report)
    return 0


def _evaluate_rows(args, cfg: RunConfig) -> List[DirectionScore]:
    if args.direction_scores:
        return _direction_rows_from_file(args.direction_scores)
    if not args.manifest:
        raise UsageError("evaluate needs a manifest or --direction-scores")
    samples = _load_samples(args.manifest, cfg.strict_manifests)
    if not args.hyp:
        raise MissingHypotheses("evaluate needs --hyp (or --direction-scores)")
    hyps = _load_hypotheses(args.hyp)
    missing = [s.id for s in samples if s.id not in hyps]
    if missing:
        raise MissingHypotheses(
            f"{len(missing)} sample(s) lack hypotheses, first: {missing[0]}"
        )
    if not cfg.piece_table_path:
        raise UsageError("metrics.piece_table_path is required for spBLEU")
    table = load_piece_table(cfg.piece_table_path)
    stack = build_stack(cfg, samples)
    rows = []
    from .corpus import split_directions

    for direction, group in split_directions(samples).items():
        hyp_texts = [hyps[s.id] for s in group]
        refs = [s.reference for s in group]
        spbleu = corpus_spbleu(hyp_texts, refs, table, smoothing=cfg.smoothing)
        comet = sum(
            stack.backends.score.score(s.text, hyps[s.id], s.reference) for s in group
        ) / len(group)
        rows.append(
            DirectionScore(
                direction=direction,
                spbleu=spbleu.score,
                comet=comet * 100.0,
                n_samples=len(group),
            )
        )
    return rows


def _filter_directions(rows: List[DirectionScore], spec: Optional[str]) -> List[DirectionScore]:
    if not spec:
        return rows
    wanted = {tuple(item.split("-", 1)) for item in spec.split(",") if item}
    filtered = [r for r in rows if r.direction in wanted]
    if not filtered:
        raise UsageError(f"no rows match --direction {spec}")
    return filtered


def cmd_evaluate(args: argparse.Namespace) -> int:
    cfg = load_run_config(args)
    ws = _workspace(cfg)
    rows = _filter_directions(_evaluate_rows(args, cfg), args.direction)
    for line in render_direction_table(rows):
        print(line)
    avg_sp, avg_comet = average_directions(rows)
    payload = {
        "command": "evaluate",
        "rows": [
            {
                "direction": list(r.direction),
                "spbleu": r.spbleu,
                "comet": r.comet,
                "n_samples": r.n_samples,
            }
            for r in rows
        ],
        "avg": {"spbleu": avg_sp, "comet": avg_comet},
    }
    if args.by_resource:
        groups = aggregate_by_resource(rows)
        print()
        for line in _resource_lines(groups):
            print(line)
        payload["by_resource"] = {
            level.value: {"spbleu": sp, "comet": comet}
            for level, (sp, comet) in groups.items()
        }
    write_report(ws, "evaluate", payload, args.report)
    return 0


def cmd_loop(args: argparse.Namespace) -> int:
    cfg = load_run_config(args)
    ws = _workspace(cfg)
    train = _load_samples(args.train, cfg.strict_manifests)
    eval_samples = _load_samples(args.eval, cfg.strict_manifests)
    if not cfg.evolution.fixed_eval_voice:
        cfg = replace(
            cfg, evolution=replace(cfg.evolution, fixed_eval_voice=cfg.voices[0])
        )
    stack = build_stack(cfg, list(train) + list(eval_samples))
    history = run_loop(
        train,
        eval_samples,
        list(cfg.voices),
        cfg.evolution,
        stack.backends,
        str(ws),
        update_hook=cfg.update_hook,
        version=stack.version,
    )
    for state in history:
        print(
            f"round {state.round_index}: "
            f"positives={state.n_positive} negatives={state.n_negative} "
            f"eval={fmt1(state.eval_score * 100)} "
            f"delta={fmt1(state.delta_vs_best * 100, signed=True)} "
            f"{state.status.value}"
        )
    payload = {
        "command": "loop",
        "rounds": [state.to_json() for state in history],
    }
    if args.report:
        write_report(ws, "loop", payload, args.report)
    return 0


def _read_round_states(ws: Path) -> Tuple[Optional[float], List[dict]]:
    rounds_dir = ws / "rounds"
    states = []
    if rounds_dir.is_dir():
        for sub in sorted(rounds_dir.iterdir(), key=lambda p: int(p.name) if p.name.isdigit() else 1 << 30):
            state_path = sub / "state.json"
            if state_path.is_file():
                with open(state_path, encoding="utf-8") as fh:
                    states.append(json.load(fh))
    if not states:
        raise NoRounds(f"no completed rounds under {rounds_dir}")
    baseline = None
    ledger_path = ws / "journal.json"
    if ledger_path.is_file():
        try:
            with open(ledger_path, encoding="utf-8") as fh:
                baseline = json.load(fh).get("baseline")
        except (OSError, json.JSONDecodeError):
            baseline = None
    return baseline, states


def cmd_report_rounds(args: argparse.Namespace) -> int:
    cfg = load_run_config(args)
    ws = _workspace(cfg)
    baseline, states = _read_round_states(ws)

    directions: List[str] = sorted(
        {d for s in states for d in s.get("eval_by_direction", {})}
    )
    multi = len(directions) > 1
    header = ["round", "eval", "delta", "status"]
    if multi:
        header += directions
    table_rows: List[List[str]] = []
    if baseline is not None:
        row = ["base", fmt1(baseline * 100), "", ""]
        if multi:
            row += ["" for _ in directions]
        table_rows.append(row)
    for s in states:
        row = [
            str(s["round_index"]),
            fmt1(s["eval_score"] * 100),
            fmt1(s["delta_vs_best"] * 100, signed=True),
            s["status"],
        ]
        if multi:
            by_dir = s.get("eval_by_direction", {})
            row += [
                fmt1(by_dir[d] * 100) if d in by_dir else "" for d in directions
            ]
        table_rows.append(row)

    widths = [max(len(h), *(len(r[i]) for r in table_rows)) for i, h in enumerate(header)]
    print("  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip())
    for row in table_rows:
        print("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())

    if args.csv:
        csv_path = Path(args.csv)
        csv_path.parent.mkdir(parents=True, exist_ok=True)
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(table_rows)

    payload = {
        "command": "report-rounds",
        "baseline": baseline,
        "rounds": states,
    }
    if args.report:
        write_report(ws, "report_rounds", payload, args.report)
    return 0


def cmd_report_resource(args: argparse.Namespace) -> int:
    cfg = load_run_config(args)
    ws = _workspace(cfg)
    rows = _filter_directions(
        _direction_rows_from_file(args.direction_scores), args.direction
    )
    groups = aggregate_by_resource(rows)
    for line in _resource_lines(groups):
        print(line)
    payload = {
        "command": "report-resource",
        "groups": {
            level.value: {"spbleu": sp, "comet": comet}
            for level, (sp, comet) in groups.items()
        },
    }
    if args.report:
        write_report(ws, "report_resource", payload, args.report)
    return 0


def cmd_report_directions(args: argparse.Namespace) -> int:
    cfg = load_run_config(args)
    ws = _workspace(cfg)
    rows = _filter_directions(
        _direction_rows_from_file(args.direction_scores), args.direction
    )
    for line in render_direction_table(rows):
        print(line)
    avg_sp, avg_comet = average_directions(rows)
    payload = {
        "command": "report-directions",
        "rows": [
            {
                "direction": list(r.direction),
                "spbleu": r.spbleu,
                "comet": r.comet,
                "n_samples": r.n_samples,
            }
            for r in rows
        ],
        "avg": {"spbleu": avg_sp, "comet": avg_comet},
    }
    if args.report:
        write_report(ws, "report_directions", payload, args.report)
    return 0


# --- parser ---------------------------------------------------------------------

def _add_global_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--workspace", help="workspace directory (overrides config)")
    parser.add_argument("--mock", action="store_true",
                        help="use in-process mock backends (offline)")
    parser.add_argument("--seed", type=int, help="evolution seed override")
    parser.add_argument("--strict", action="store_true",
                        help="reject unknown manifest fields")
    parser.add_argument("--verbose", action="store_true", help="log progress to stderr")
    parser.add_argument("--report", help="JSON report path override")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evoloop",
        description="Self-evolution pipeline for speech-guided machine translation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a JSONL manifest")
    p.add_argument("manifest")
    _add_global_flags(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("synth", help="synthesize speech for a manifest")
    p.add_argument("manifest")
    p.add_argument("--out", help="output manifest path")
    p.add_argument("--voices", help="comma-separated voice pool")
    _add_global_flags(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("translate", help="translate a manifest")
    p.add_argument("manifest")
    p.add_argument("--mode", choices=["mt", "smt"], default="mt")
    p.add_argument("--out", help="hypotheses JSONL path")
    _add_global_flags(p)
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("score", help="score hypotheses against references")
    p.add_argument("manifest")
    p.add_argument("--hyp", required=True, help="hypotheses JSONL")
    p.add_argument("--out", help="scores JSONL path")
    _add_global_flags(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("classify", help="label samples and emit the training spec")
    p.add_argument("manifest", help="manifest with synthesized audio")
    p.add_argument("--out", help="output directory")
    p.add_argument("--round-index", type=int, default=1)
    p.add_argument("--speech-source", choices=["PreferSynthetic", "PreferAuthentic"])
    _add_global_flags(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("evaluate", help="per-direction score table")
    p.add_argument("manifest", nargs="?", help="manifest with references")
    p.add_argument("--hyp", help="hypotheses JSONL from a translate run")
    p.add_argument("--direction-scores", help="precomputed per-direction rows (JSON)")
    p.add_argument("--direction", help="comma-separated src-tgt filter")
    p.add_argument("--by-resource", action="store_true",
                   help="also aggregate by resource level")
    p.add_argument("--piece-table", help="piece table TSV for spBLEU")
    _add_global_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("loop", help="run self-evolution rounds")
    p.add_argument("--train", required=True, help="training manifest")
    p.add_argument("--eval", required=True, help="evaluation manifest")
    p.add_argument("--voices", help="comma-separated voice pool")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--patience", type=int)
    p.add_argument("--max-rounds", type=int)
    p.add_argument("--eval-voice", help="fixed evaluation voice")
    p.add_argument("--speech-source", choices=["PreferSynthetic", "PreferAuthentic"])
    p.add_argument("--update-hook", help="command template with {jobspec}")
    p.add_argument("--mock-schedule",
                   help="comma-separated eval scores per model version (mock mode)")
    _add_global_flags(p)
    p.set_defaults(func=cmd_loop)

    p = sub.add_parser("report", help="render reports from artifacts")
    rsub = p.add_subparsers(dest="report_kind", required=True)

    r = rsub.add_parser("rounds", help="per-round gains from journals")
    r.add_argument("--csv", help="also write the table as CSV")
    _add_global_flags(r)
    r.set_defaults(func=cmd_report_rounds)

    r = rsub.add_parser("resource", help="resource-level aggregation")
    r.add_argument("--direction-scores", required=True)
    r.add_argument("--direction", help="comma-separated src-tgt filter")
    _add_global_flags(r)
    r.set_defaults(func=cmd_report_resource)

    r = rsub.add_parser("directions", help="per-direction table")
    r.add_argument("--direction-scores", required=True)
    r.add_argument("--direction", help="comma-separated src-tgt filter")
    _add_global_flags(r)
    r.set_defaults(func=cmd_report_directions)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "verbose", False):
        logging.basicConfig(level=logging.INFO, stream=sys.stderr)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EvoloopError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
