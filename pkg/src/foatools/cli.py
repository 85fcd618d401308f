"""Command-line surface for scripted pipelines and desk-scale experiments.

Every subcommand maps onto one library operation, prints a JSON result on
standard output (with a ``schema_version`` field) and is deterministic
given identical inputs and an explicit ``--seed`` wherever sampling is
involved. Exit codes: 0 success, 1 usage error, 2 data error (the
diagnostic names the offending file, with a byte offset when the parser
knows one). Output files are written atomically, so failures never leave
partial files behind.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import curation, guidance, patch_saliency, semantic_metrics, spatial_metrics
from .code_pattern import CodeMatrix, Pattern, ReorgMatrix, pack, pattern_steps, unpack
from .errors import FoaToolsError
from .foa import (
    ENERGY_MODE_POWER,
    ENERGY_MODES,
    Direction,
    Rotation,
    SphereGrid,
    decode_to_mono,
    encode_mono,
    energy_map,
    rotate,
)
from .tensor_io import (
    CODE_MAGIC,
    atomic_write,
    read_code_matrix,
    read_foa_wav,
    read_tensor,
    read_wav,
    write_code_matrix,
    write_energy_map_csv,
    write_energy_map_pgm,
    write_foa_wav,
    write_pgm,
    write_tensor,
    write_wav,
)

SCHEMA_VERSION = 1

SPATIAL_CSV_COLUMNS = ("cc_all", "cc_1fps", "cc_5fps", "auc_all", "auc_1fps", "auc_5fps")


class UsageError(Exception):
    """Bad flags or flag combinations; mapped to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return value


def _print_json(payload: dict) -> None:
    payload = {"schema_version": SCHEMA_VERSION, **payload}
    print(json.dumps(payload, sort_keys=True))


def _parse_direction(text: str, degrees: bool) -> Direction:
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"direction must be 'azimuth,elevation', got {text!r}")
    try:
        azimuth, elevation = float(parts[0]), float(parts[1])
    except ValueError:
        raise UsageError(f"direction components must be numbers, got {text!r}") from None
    if degrees:
        azimuth, elevation = math.radians(azimuth), math.radians(elevation)
    try:
        return Direction(azimuth, elevation)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _parse_grid(text: str) -> SphereGrid:
    parts = text.lower().split("x")
    try:
        bands, azimuths = int(parts[0]), int(parts[1])
    except (ValueError, IndexError):
        raise UsageError(f"grid must be 'BANDSxAZIMUTHS', e.g. 32x64, got {text!r}") from None
    if len(parts) != 2 or bands < 1 or azimuths < 1:
        raise UsageError(f"grid must be 'BANDSxAZIMUTHS' with positive counts, got {text!r}")
    return SphereGrid(bands, azimuths)


def _parse_window(text):
    if text is None:
        return None
    parts = text.split(":")
    try:
        start, end = int(parts[0]), int(parts[1])
    except (ValueError, IndexError):
        raise UsageError(f"window must be 'START:END' in samples, got {text!r}") from None
    if len(parts) != 2:
        raise UsageError(f"window must be 'START:END' in samples, got {text!r}")
    return start, end


def _direction_dict(direction: Direction) -> dict:
    return {"azimuth": direction.azimuth, "elevation": direction.elevation}


def _read_mono_wav(path):
    samples, sample_rate = read_wav(path)
    if samples.shape[0] != 1:
        raise FoaToolsError(f"{path}: expected mono audio, found {samples.shape[0]} channels")
    return samples[0], sample_rate


# ---------------------------------------------------------------------------
# Subcommand handlers


def cmd_encode(args) -> int:
    signal, sample_rate = _read_mono_wav(args.input)
    direction = _parse_direction(args.dir, args.degrees)
    clip = encode_mono(signal, direction, sample_rate)
    write_foa_wav(clip, args.output, args.encoding)
    _print_json(
        {
            "direction": _direction_dict(direction),
            "n_samples": clip.n_samples,
            "output": args.output,
            "sample_rate": clip.sample_rate,
        }
    )
    return 0


def cmd_decode(args) -> int:
    clip = read_foa_wav(args.input)
    direction = _parse_direction(args.dir, args.degrees)
    mono = decode_to_mono(clip, direction)
    write_wav(mono, clip.sample_rate, args.output, args.encoding)
    _print_json(
        {
            "direction": _direction_dict(direction),
            "n_samples": int(mono.size),
            "output": args.output,
            "sample_rate": clip.sample_rate,
        }
    )
    return 0


def _rotation_from_args(args) -> Rotation:
    if args.matrix is not None:
        entries = args.matrix.split(",")
        if len(entries) != 9:
            raise UsageError("matrix needs 9 comma-separated row-major entries")
        try:
            values = [float(e) for e in entries]
        except ValueError:
            raise UsageError("matrix entries must be numbers") from None
        return Rotation(np.array(values).reshape(3, 3))
    if args.z_quarters is not None:
        quarter = Rotation.quarter_turn_z()
        matrix = np.eye(3)
        for _ in range(args.z_quarters % 4):
            matrix = quarter.matrix @ matrix
        return Rotation(matrix)
    return Rotation.about_z(math.radians(args.z_degrees))


def cmd_rotate(args) -> int:
    clip = read_foa_wav(args.input)
    rotation = _rotation_from_args(args)
    write_foa_wav(rotate(clip, rotation), args.output, args.encoding)
    _print_json(
        {
            "matrix": [[float(v) for v in row] for row in rotation.matrix],
            "n_samples": clip.n_samples,
            "output": args.output,
        }
    )
    return 0


def cmd_energy_map(args) -> int:
    clip = read_foa_wav(args.input)
    grid = _parse_grid(args.grid)
    emap = energy_map(clip, grid, _parse_window(args.window), args.mode)
    if args.csv:
        write_energy_map_csv(emap, args.csv)
    if args.pgm:
        write_energy_map_pgm(emap, args.pgm)
    argmax = grid.direction(emap.argmax_cell())
    _print_json(
        {
            "argmax": _direction_dict(argmax),
            "mode": emap.mode,
            "n_cells": grid.n_cells,
            "value_max": float(emap.values.max()),
            "value_weighted_mean": float(grid.weights @ emap.values),
            "window": list(emap.window),
        }
    )
    return 0


def _spatial_one(gen_path, gt_path, grid, fixation_percentile) -> dict:
    report = spatial_metrics.evaluate_windows(
        read_foa_wav(gen_path), read_foa_wav(gt_path), grid, fixation_percentile
    )
    return report.to_dict()


def cmd_eval_spatial(args) -> int:
    grid = _parse_grid(args.grid)
    if args.manifest:
        if args.gen or args.gt:
            raise UsageError("give either a gen/gt pair or --manifest, not both")
        if not args.out:
            raise UsageError("--manifest mode needs --out for the NDJSON results")
        records = _load_manifest(args.manifest, required=("gen", "gt"))
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(
                pool.map(
                    lambda r: _spatial_one(r["gen"], r["gt"], grid, args.fixation_percentile),
                    records,
                )
            )
        lines = []
        for record, report in zip(records, reports):
            row = {"schema_version": SCHEMA_VERSION, "gen": record["gen"], "gt": record["gt"]}
            row.update(report)
            lines.append(json.dumps(row, sort_keys=True))
        _write_text(args.out, "\n".join(lines) + "\n")
        _print_json({"n_pairs": len(records), "output": args.out})
        return 0
    if not (args.gen and args.gt):
        raise UsageError("need generated and reference WAV paths (or --manifest)")
    report = _spatial_one(args.gen, args.gt, grid, args.fixation_percentile)
    if args.csv:
        row = ",".join(f"{report[c]:.17g}" for c in SPATIAL_CSV_COLUMNS)
        _write_text(args.csv, row + "\n")
    _print_json(report)
    return 0


def _features_2d(path) -> np.ndarray:
    tensor = read_tensor(path)
    if tensor.ndim != 2:
        raise FoaToolsError(f"{path}: feature tensors must be 2-D, got shape {tensor.shape}")
    return np.asarray(tensor, dtype=np.float64)


def _mean_kld(gen_path, gt_path, epsilon) -> float:
    gen = np.asarray(read_tensor(gen_path), dtype=np.float64)
    gt = np.asarray(read_tensor(gt_path), dtype=np.float64)
    if gen.shape != gt.shape:
        raise FoaToolsError(
            f"{gen_path} and {gt_path} hold mismatched shapes {gen.shape} vs {gt.shape}"
        )
    if gen.ndim == 1:
        return semantic_metrics.kld(gen, gt, epsilon)
    if gen.ndim == 2:
        values = [
            semantic_metrics.kld(gen[i], gt[i], epsilon) for i in range(gen.shape[0])
        ]
        return float(np.mean(values))
    raise FoaToolsError(f"{gen_path}: probability tensors must be 1-D or 2-D")


def _semantic_one(record, epsilon) -> dict:
    row = {}
    if "gen_features" in record or "gt_features" in record:
        stats_gen = semantic_metrics.gaussian_stats(_features_2d(record["gen_features"]))
        stats_gt = semantic_metrics.gaussian_stats(_features_2d(record["gt_features"]))
        row["fad"] = semantic_metrics.frechet_distance(stats_gen, stats_gt)
    if "gen_probs" in record or "gt_probs" in record:
        row["kld"] = _mean_kld(record["gen_probs"], record["gt_probs"], epsilon)
    if not row:
        raise FoaToolsError("manifest record carries neither features nor probabilities")
    return row


def cmd_eval_semantic(args) -> int:
    if args.manifest:
        if not args.out:
            raise UsageError("--manifest mode needs --out for the NDJSON results")
        records = _load_manifest(args.manifest, required=())
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(lambda r: _semantic_one(r, args.epsilon), records))
        lines = []
        for record, row in zip(records, rows):
            payload = {"schema_version": SCHEMA_VERSION, **record, **row}
            lines.append(json.dumps(payload, sort_keys=True))
        _write_text(args.out, "\n".join(lines) + "\n")
        _print_json({"n_records": len(records), "output": args.out})
        return 0
    result = {}
    if bool(args.gen_features) != bool(args.gt_features):
        raise UsageError("--gen-features and --gt-features go together")
    if bool(args.gen_probs) != bool(args.gt_probs):
        raise UsageError("--gen-probs and --gt-probs go together")
    if not (args.gen_features or args.gen_probs or args.channels):
        raise UsageError("nothing to evaluate; pass feature, probability or channel inputs")
    if args.gen_features:
        stats_gen = semantic_metrics.gaussian_stats(_features_2d(args.gen_features))
        stats_gt = semantic_metrics.gaussian_stats(_features_2d(args.gt_features))
        result["fad"] = semantic_metrics.frechet_distance(stats_gen, stats_gt)
    if args.gen_probs:
        result["kld"] = _mean_kld(args.gen_probs, args.gt_probs, args.epsilon)
    if args.channels:
        with open(args.channels, "r", encoding="utf-8") as handle:
            try:
                mapping = json.load(handle)
            except json.JSONDecodeError as exc:
                raise FoaToolsError(f"{args.channels}: bad JSON: {exc}") from exc
        if not isinstance(mapping, dict):
            raise FoaToolsError(f"{args.channels}: expected an object of channel entries")
        pairs = {}
        for name, entry in mapping.items():
            if not isinstance(entry, dict) or "gen" not in entry or "gt" not in entry:
                raise FoaToolsError(
                    f"{args.channels}: channel {name!r} needs 'gen' and 'gt' paths"
                )
            pairs[name] = (_features_2d(entry["gen"]), _features_2d(entry["gt"]))
        result["fad_avg"] = semantic_metrics.fad_avg(pairs)
    _print_json(result)
    return 0


def cmd_patch_energy(args) -> int:
    embeddings = read_tensor(args.input)
    if embeddings.ndim != 4:
        raise FoaToolsError(
            f"{args.input}: patch embeddings must be 4-D, got shape {embeddings.shape}"
        )
    spatial, temporal = patch_saliency.patch_scores(
        np.asarray(embeddings, dtype=np.float64), args.spatial_window, args.temporal_window
    )
    energy = patch_saliency.energy_from_scores(
        spatial, temporal, args.temperature, args.top_p
    )
    write_tensor(energy.astype(np.float32), args.output)
    if args.pgm_dir:
        os.makedirs(args.pgm_dir, exist_ok=True)
        for i in range(energy.shape[0]):
            write_pgm(energy[i], os.path.join(args.pgm_dir, f"frame_{i:04d}.pgm"))
    _print_json(
        {
            "frames": int(energy.shape[0]),
            "output": args.output,
            "patch_cols": int(energy.shape[2]),
            "patch_rows": int(energy.shape[1]),
        }
    )
    return 0


def cmd_pattern(args) -> int:
    matrix = read_code_matrix(args.input)
    if args.action == "pack":
        if not isinstance(matrix, CodeMatrix):
            raise FoaToolsError(f"{args.input}: already pattern-scheduled; unpack it first")
        reorg = pack(matrix, Pattern(args.pattern))
        write_code_matrix(reorg, args.output)
        _print_json(
            {
                "n_frames": matrix.n_frames,
                "n_steps": reorg.n_steps,
                "output": args.output,
                "pattern": reorg.pattern.value,
            }
        )
        return 0
    if not isinstance(matrix, ReorgMatrix):
        raise FoaToolsError(f"{args.input}: not pattern-scheduled; nothing to unpack")
    raw = unpack(matrix)
    write_code_matrix(raw, args.output)
    _print_json(
        {
            "n_frames": raw.n_frames,
            "n_steps": matrix.n_steps,
            "output": args.output,
            "pattern": matrix.pattern.value,
        }
    )
    return 0


def cmd_generate(args) -> int:
    table = read_code_matrix(args.table)
    if not isinstance(table, CodeMatrix):
        raise FoaToolsError(f"{args.table}: table predictor needs a raw code matrix")
    pattern = Pattern(args.pattern)
    predictor = guidance.TablePredictor(table, pattern)
    config = guidance.GuidanceConfig(args.guidance, args.omega, args.omega2)
    generated = guidance.generate(
        predictor,
        table.n_codebooks_per_channel,
        table.n_frames,
        pattern,
        config,
        temperature=args.temperature,
        top_p=args.top_p,
        seed=args.seed,
        argmax=args.argmax,
    )
    write_code_matrix(generated, args.output)
    _print_json(
        {
            "guidance": config.mode,
            "n_frames": generated.n_frames,
            "n_steps": pattern_steps(pattern, table.n_codebooks_per_channel, table.n_frames),
            "output": args.output,
            "pattern": pattern.value,
            "predictor_queries": predictor.n_queries,
        }
    )
    return 0


def _load_manifest(path, required) -> list:
    records = []
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FoaToolsError(f"{path}:{lineno}: bad JSON record: {exc}") from exc
            for key in required:
                if key not in record:
                    raise FoaToolsError(f"{path}:{lineno}: record misses {key!r}")
            records.append(record)
    if not records:
        raise FoaToolsError(f"{path}: manifest holds no records")
    return records


def _curate_one(record, args, grid) -> dict:
    clip = read_foa_wav(record["path"])
    amplitude_ok = curation.amplitude_gate(clip, args.amplitude_threshold)
    mask = curation.segment_mask(clip, args.rms_threshold)
    windows = (
        [[w.start_second, w.end_second] for w in curation.select_windows(mask)]
        if mask.size >= curation.WINDOW_SECONDS
        else []
    )
    try:
        center = _direction_dict(curation.fov_center(clip, grid))
    except FoaToolsError:
        center = None
    return {
        "amplitude_ok": bool(amplitude_ok),
        "fov_center": center,
        "path": record["path"],
        "valid_seconds": int(mask.sum()),
        "windows": windows,
    }


def cmd_curate(args) -> int:
    grid = _parse_grid(args.grid)
    records = _load_manifest(args.manifest, required=("path",))
    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        results = list(pool.map(lambda r: _curate_one(r, args, grid), records))

    scored = [record for record in records if "score" in record]
    if scored and len(scored) != len(records):
        raise FoaToolsError(f"{args.manifest}: either every record carries a score or none")
    if scored:
        keep_scores = curation.relevance_filter([float(r["score"]) for r in records])
    else:
        keep_scores = [None] * len(records)

    lines = []
    n_kept = 0
    for record, result, score_keep in zip(records, results, keep_scores):
        keep = bool(result["amplitude_ok"]) and bool(result["windows"])
        if score_keep is not None:
            result["score"] = float(record["score"])
            result["score_keep"] = bool(score_keep)
            keep = keep and bool(score_keep)
        result["keep"] = keep
        result["schema_version"] = SCHEMA_VERSION
        n_kept += keep
        lines.append(json.dumps(result, sort_keys=True))
    _write_text(args.out, "\n".join(lines) + "\n")
    _print_json({"n_clips": len(records), "n_kept": n_kept, "output": args.out})
    return 0


def _describe_file(path) -> dict:
    with open(path, "rb") as handle:
        head = handle.read(4)
    if head == b"RIFF":
        samples, sample_rate = read_wav(path)
        return {
            "format": "wav",
            "n_channels": int(samples.shape[0]),
            "n_samples": int(samples.shape[1]),
            "path": path,
            "sample_rate": sample_rate,
        }
    if head == CODE_MAGIC:
        matrix = read_code_matrix(path)
        return {
            "format": "code_matrix",
            "n_codebooks_per_channel": matrix.n_codebooks_per_channel,
            "n_frames": matrix.n_frames,
            "path": path,
            "pattern": matrix.pattern.value if isinstance(matrix, ReorgMatrix) else None,
            "vocab_size": matrix.vocab_size,
        }
    tensor = read_tensor(path)
    return {
        "dtype": str(tensor.dtype),
        "format": "tensor",
        "path": path,
        "shape": list(tensor.shape),
    }


def cmd_info(args) -> int:
    _print_json({"files": [_describe_file(path) for path in args.paths]})
    return 0


def _write_text(path, text: str) -> None:
    with atomic_write(path) as handle:
        handle.write(text.encode("utf-8"))


# ---------------------------------------------------------------------------
# Parser


def _add_direction_flags(parser) -> None:
    parser.add_argument(
        "--dir", required=True, help="direction as 'azimuth,elevation' in radians"
    )
    parser.add_argument(
        "--degrees", action="store_true", help="interpret --dir in degrees instead of radians"
    )


def _add_encoding_flag(parser) -> None:
    parser.add_argument(
        "--encoding",
        choices=("float32", "pcm16"),
        default="float32",
        help="output WAV sample encoding (default float32)",
    )


def _add_grid_flag(parser) -> None:
    parser.add_argument(
        "--grid",
        default="32x64",
        help="sphere grid as 'BANDSxAZIMUTHS' (elevation bands x max azimuth samples)",
    )


def build_parser() -> _Parser:
    parser = _Parser(prog="foatools", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="pan a mono WAV to 4-channel ambisonics")
    _add_direction_flags(p)
    _add_encoding_flag(p)
    p.add_argument("input", help="mono input WAV")
    p.add_argument("output", help="4-channel output WAV (W, X, Y, Z)")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="decode an ambisonic WAV to mono at a heading")
    _add_direction_flags(p)
    _add_encoding_flag(p)
    p.add_argument("input", help="4-channel input WAV")
    p.add_argument("output", help="mono output WAV")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("rotate", help="rotate the sound field of an ambisonic WAV")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--z-degrees", type=float, help="turn about the vertical axis, degrees")
    group.add_argument(
        "--z-quarters",
        type=int,
        help="exact number of 90-degree turns about the vertical axis",
    )
    group.add_argument("--matrix", help="9 comma-separated row-major rotation matrix entries")
    _add_encoding_flag(p)
    p.add_argument("input", help="4-channel input WAV")
    p.add_argument("output", help="4-channel output WAV")
    p.set_defaults(func=cmd_rotate)

    p = sub.add_parser("energy-map", help="per-direction energy of an ambisonic WAV")
    _add_grid_flag(p)
    p.add_argument(
        "--mode", choices=ENERGY_MODES, default=ENERGY_MODE_POWER,
        help="power = mean squared decoded signal; literal-linear = mean decoded signal",
    )
    p.add_argument("--window", help="analysis window 'START:END' in samples (default full clip)")
    p.add_argument("--csv", help="write per-cell CSV (azimuth, elevation, weight, value)")
    p.add_argument("--pgm", help="write a PGM heatmap (one row per elevation band)")
    p.add_argument("input", help="4-channel input WAV")
    p.set_defaults(func=cmd_energy_map)

    p = sub.add_parser("eval-spatial", help="windowed correlation/AUC between two clips")
    _add_grid_flag(p)
    p.add_argument("gen", nargs="?", help="generated 4-channel WAV")
    p.add_argument("gt", nargs="?", help="reference 4-channel WAV")
    p.add_argument(
        "--fixation-percentile", type=float, default=95.0,
        help="weighted percentile of the reference map that defines fixations (percent)",
    )
    p.add_argument("--csv", help="also write the six scores as one CSV line")
    p.add_argument("--manifest", help="NDJSON manifest of {'gen':..., 'gt':...} records")
    p.add_argument("--out", help="output NDJSON path (manifest mode)")
    p.add_argument("--jobs", type=_positive_int, default=1, help="parallel clip pairs (manifest mode)")
    p.set_defaults(func=cmd_eval_spatial)

    p = sub.add_parser(
        "eval-semantic", help="Frechet distance / KL divergence over feature tensors"
    )
    p.add_argument("--gen-features", help="generated feature tensor (rows x dims, f32)")
    p.add_argument("--gt-features", help="reference feature tensor (rows x dims, f32)")
    p.add_argument("--gen-probs", help="generated class probabilities (1-D, or clips x classes)")
    p.add_argument("--gt-probs", help="reference class probabilities, same shape")
    p.add_argument(
        "--channels",
        help="JSON file mapping W/X/Y/Z to {'gen': tensor, 'gt': tensor} for the channel-mean distance",
    )
    p.add_argument("--epsilon", type=float, default=1e-6, help="probability floor for the KLD")
    p.add_argument(
        "--manifest",
        help="NDJSON manifest of {'gen_features':..., 'gt_features':...} and/or *_probs records",
    )
    p.add_argument("--out", help="output NDJSON path (manifest mode)")
    p.add_argument("--jobs", type=_positive_int, default=1, help="parallel records (manifest mode)")
    p.set_defaults(func=cmd_eval_semantic)

    p = sub.add_parser("patch-energy", help="patchwise energy map from an embedding tensor")
    p.add_argument("--spatial-window", type=int, default=1, help="spatial half-window N (patches)")
    p.add_argument("--temporal-window", type=int, default=1, help="temporal half-window T (frames)")
    p.add_argument("--temperature", type=float, default=0.1, help="softmax temperature")
    p.add_argument("--top-p", type=float, default=0.7, help="nucleus mass kept after averaging")
    p.add_argument("--pgm-dir", help="directory for per-frame PGM heatmaps")
    p.add_argument("input", help="patch embedding tensor (time x rows x cols x dims, f32)")
    p.add_argument("output", help="energy tensor output path (time x rows x cols, f32)")
    p.set_defaults(func=cmd_patch_energy)

    p = sub.add_parser("pattern", help="reorganize code matrices onto step schedules")
    p.add_argument("action", choices=("pack", "unpack"))
    p.add_argument(
        "--pattern",
        choices=[pat.value for pat in Pattern],
        default=Pattern.PROPOSED.value,
        help="step schedule (pack only; unpack reads it from the file header)",
    )
    p.add_argument("input", help="input code matrix file")
    p.add_argument("output", help="output code matrix file")
    p.set_defaults(func=cmd_pattern)

    p = sub.add_parser(
        "generate", help="autoregressive generation demo driven by a table predictor"
    )
    p.add_argument("--table", required=True, help="raw code matrix file the predictor replays")
    p.add_argument(
        "--pattern",
        choices=[pat.value for pat in Pattern],
        default=Pattern.PROPOSED.value,
        help="step schedule to generate along",
    )
    p.add_argument(
        "--guidance", choices=guidance.MODES, default="none", help="logit guidance mode"
    )
    p.add_argument("--omega", type=float, default=guidance.DEFAULT_OMEGA, help="guidance scale")
    p.add_argument("--omega2", type=float, default=0.0, help="second scale (dual mode)")
    p.add_argument("--temperature", type=float, default=1.0, help="sampling temperature")
    p.add_argument("--top-p", type=float, default=1.0, help="nucleus sampling mass")
    p.add_argument("--seed", type=int, default=0, help="sampling seed")
    p.add_argument("--argmax", action="store_true", help="take the most likely code each step")
    p.add_argument("output", help="generated code matrix file")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("curate", help="run the corpus filters over a clip manifest")
    _add_grid_flag(p)
    p.add_argument("--manifest", required=True, help="NDJSON manifest of {'path':..., 'score':...}")
    p.add_argument("--out", required=True, help="output NDJSON with decisions")
    p.add_argument(
        "--rms-threshold", type=float, required=True,
        help="per-second RMS floor on the W channel (amplitude units)",
    )
    p.add_argument(
        "--amplitude-threshold", type=float, default=curation.DEFAULT_AMPLITUDE_FLOOR,
        help="per-second mean |amplitude| floor on every channel",
    )
    p.add_argument("--jobs", type=_positive_int, default=1, help="parallel clips")
    p.set_defaults(func=cmd_curate)

    p = sub.add_parser("info", help="describe WAV / tensor / code matrix files")
    p.add_argument("paths", nargs="+", help="files to inspect")
    p.set_defaults(func=cmd_info)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args) or 0
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (FoaToolsError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
