"""Configuration files, run manifests and CSV outputs of a simulation run.

Config (JSON)::

    {
      "n_train": 100, "n_test": 1000, "replicates": 1000,
      "master_seed": 0, "beta0": 1, "sigma2": 1, "bins": 60,
      "grid": {
        "theta": [1, 10, 100, 1000],
        "p_rel": [1, 2, 5, 10],
        "p_noise": [1, 10, 50],
        "beta": {"from": 0, "to": 0.5, "step": 0.01}
      }
    }

Every key is optional; missing ones take the values above. Settings are
enumerated with ``theta`` outermost and ``beta`` innermost, each axis in
the order written, and numbered from 0 in that order.
"""

from __future__ import annotations

import csv
import datetime as _dt
import hashlib
import itertools
import json
import math
import os
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from . import __version__
from .errors import ParseError, ValidationError
from .experiment import (
    PAPER_P_NOISE,
    PAPER_P_REL,
    PAPER_THETAS,
    SettingSummary,
)
from .simgen import SimConfig

DEFAULT_BINS = 60

DEFAULTS: dict[str, Any] = {
    "n_train": 100,
    "n_test": 1000,
    "replicates": 1000,
    "master_seed": 0,
    "beta0": 1.0,
    "sigma2": 1.0,
    "bins": DEFAULT_BINS,
}
DEFAULT_GRID: dict[str, Any] = {
    "theta": list(PAPER_THETAS),
    "p_rel": list(PAPER_P_REL),
    "p_noise": list(PAPER_P_NOISE),
    "beta": {"from": 0.0, "to": 0.5, "step": 0.01},
}
AXES = ("theta", "p_rel", "p_noise", "beta")

SUMMARY_HEADER = [
    "theta", "p_rel", "p_noise", "beta", "n_train", "n_test", "replicates",
    "p_relevant", "p_noise_sel", "p_none",
]
DISTRIBUTION_HEADER = [
    "setting_id", "theta", "p_rel", "p_noise", "beta",
    "replicate_id", "group", "delta_rmse", "score",
]
HISTOGRAM_HEADER = [
    "theta", "p_rel", "p_noise", "group", "beta", "bin", "bin_lo", "bin_hi", "count",
]


@dataclass(frozen=True)
class RunManifest:
    config_digest: str
    tool_version: str
    master_seed: int
    timestamp: str
    setting_count: int


@dataclass(frozen=True)
class ResolvedConfig:
    settings: list[SimConfig]
    manifest: RunManifest
    resolved: dict
    bins: int


def fmt(x) -> str:
    """Shortest round-trip text for a number; integers stay integral."""
    if isinstance(x, (bool, np.bool_)):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def config_digest(resolved: dict) -> str:
    return hashlib.sha256(canonical_json(resolved).encode("utf-8")).hexdigest()


def expand_range(spec: dict, where: str, problems: list[str]) -> list[float]:
    """Expand ``{"from", "to", "step"}`` into an inclusive list of floats."""
    missing = [k for k in ("from", "to", "step") if k not in spec]
    extra = sorted(set(spec) - {"from", "to", "step"})
    if missing or extra:
        problems.append(f"{where}: range needs exactly from/to/step (missing {missing}, unknown {extra})")
        return []
    lo, hi, step = spec["from"], spec["to"], spec["step"]
    if not all(_is_number(v) for v in (lo, hi, step)):
        problems.append(f"{where}: from/to/step must be numbers")
        return []
    if not step > 0:
        problems.append(f"{where}: step must be > 0, got {step}")
        return []
    if hi < lo:
        problems.append(f"{where}: to ({hi}) is below from ({lo})")
        return []
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    # round away accumulated binary error so 0.07 stays 0.07
    return [float(round(lo + k * step, 12)) for k in range(count)]


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _json_error(path: Path, text: str, exc: json.JSONDecodeError) -> ParseError:
    line = text.splitlines()[exc.lineno - 1] if 0 < exc.lineno <= len(text.splitlines()) else ""
    return ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}\n    {line}")


def resolve_config(raw: dict, *, seed: int | None = None, bins: int | None = None) -> dict:
    """Validate a decoded config and fill in defaults.

    Raises:
        ValidationError: listing every problem found.
    """
    problems: list[str] = []
    if not isinstance(raw, dict):
        raise ValidationError(["top level must be a JSON object"])
    known = set(DEFAULTS) | {"grid"}
    for key in sorted(set(raw) - known):
        problems.append(f"unknown key {key!r}")

    out: dict[str, Any] = {}
    for key, default in DEFAULTS.items():
        value = raw.get(key, default)
        out[key] = value
    if seed is not None:
        out["master_seed"] = seed
    if bins is not None:
        out["bins"] = bins

    for key in ("n_train", "n_test"):
        if not (_is_int(out[key]) and out[key] >= 2):
            problems.append(f"{key}: must be an integer >= 2, got {out[key]!r}")
    if not (_is_int(out["replicates"]) and out["replicates"] >= 1):
        problems.append(f"replicates: must be a positive integer, got {out['replicates']!r}")
    if not (_is_int(out["master_seed"]) and 0 <= out["master_seed"] < 2**64):
        problems.append(f"master_seed: must be an unsigned 64-bit integer, got {out['master_seed']!r}")
    if not (_is_int(out["bins"]) and out["bins"] >= 2):
        problems.append(f"bins: must be an integer >= 2, got {out['bins']!r}")
    if not _is_number(out["beta0"]):
        problems.append(f"beta0: must be a finite number, got {out['beta0']!r}")
    else:
        out["beta0"] = float(out["beta0"])
    if not (_is_number(out["sigma2"]) and out["sigma2"] > 0):
        problems.append(f"sigma2: must be a number > 0, got {out['sigma2']!r}")
    else:
        out["sigma2"] = float(out["sigma2"])

    grid_raw = raw.get("grid", {})
    grid: dict[str, list] = {}
    if not isinstance(grid_raw, dict):
        problems.append("grid: must be an object")
        grid_raw = {}
    for key in sorted(set(grid_raw) - set(AXES)):
        problems.append(f"grid: unknown axis {key!r}")
    for axis in AXES:
        value = grid_raw.get(axis, DEFAULT_GRID[axis])
        where = f"grid.{axis}"
        if axis == "beta" and isinstance(value, dict):
            values = expand_range(value, where, problems)
        elif isinstance(value, list):
            values = list(value)
        else:
            problems.append(f"{where}: must be a list" + (" or a from/to/step range" if axis == "beta" else ""))
            continue
        if not values and not any(p.startswith(where) for p in problems):
            problems.append(f"{where}: axis is empty")
        for v in values:
            if axis in ("p_rel", "p_noise"):
                floor = 1 if axis == "p_rel" else 0
                if not (_is_int(v) and v >= floor):
                    problems.append(f"{where}: {v!r} is not an integer >= {floor}")
            elif axis == "theta":
                if not (_is_number(v) and v > 0):
                    problems.append(f"{where}: {v!r} is not a number > 0")
            elif not (_is_number(v) and v >= 0):
                problems.append(f"{where}: {v!r} is not a number >= 0")
        if len(set(values)) != len(values) and all(_is_number(v) for v in values):
            problems.append(f"{where}: duplicate values")
        grid[axis] = [float(v) if axis in ("theta", "beta") and _is_number(v) else v for v in values]

    if problems:
        raise ValidationError(problems)
    out["grid"] = grid
    return out


def settings_from_resolved(resolved: dict) -> list[SimConfig]:
    g = resolved["grid"]
    return [
        SimConfig(
            p_rel=p_rel,
            p_noise=p_noise,
            beta=beta,
            theta=theta,
            n_train=resolved["n_train"],
            n_test=resolved["n_test"],
            beta0=resolved["beta0"],
            sigma2=resolved["sigma2"],
            replicates=resolved["replicates"],
            master_seed=resolved["master_seed"],
        )
        for theta, p_rel, p_noise, beta in itertools.product(g["theta"], g["p_rel"], g["p_noise"], g["beta"])
    ]


def utc_timestamp() -> str:
    """Current UTC time, or ``SOURCE_DATE_EPOCH`` when set (for reproducible manifests)."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    now = (
        _dt.datetime.fromtimestamp(int(epoch), tz=_dt.timezone.utc)
        if epoch
        else _dt.datetime.now(tz=_dt.timezone.utc)
    )
    return now.replace(microsecond=0).isoformat().replace("+00:00", "Z")


def parse_config(path, *, seed: int | None = None, bins: int | None = None) -> ResolvedConfig:
    """Read, validate and expand a JSON config file.

    Raises:
        ParseError: unreadable file or malformed JSON (with line/column).
        ValidationError: schema violations, all of them at once.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ParseError(f"config file not found: {path}") from None
    except (OSError, UnicodeDecodeError) as exc:
        raise ParseError(f"cannot read config file {path}: {exc}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _json_error(path, text, exc) from None
    resolved = resolve_config(raw, seed=seed, bins=bins)
    settings = settings_from_resolved(resolved)
    manifest = RunManifest(
        config_digest=config_digest(resolved),
        tool_version=__version__,
        master_seed=resolved["master_seed"],
        timestamp=utc_timestamp(),
        setting_count=len(settings),
    )
    return ResolvedConfig(settings, manifest, resolved, resolved["bins"])


def _write_csv(path, header: Sequence[str], rows: Iterable[Sequence[str]]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def summary_rows(summaries: Sequence[SettingSummary]) -> list[list[str]]:
    rows = []
    for s in summaries:
        c = s.setting
        rows.append([
            fmt(c.theta), fmt(c.p_rel), fmt(c.p_noise), fmt(c.beta),
            fmt(c.n_train), fmt(c.n_test), fmt(c.replicates),
            f"{s.p_relevant_selected:.6f}", f"{s.p_noise_selected:.6f}", f"{s.p_none_selected:.6f}",
        ])
    return rows


def emit_summary_csv(summaries: Sequence[SettingSummary], path) -> Path:
    """One row per setting, proportions to 6 decimals.

    Rows keep the order of ``summaries``, which for ``run_grid`` output is
    the setting order produced by ``parse_config``.
    """
    if not summaries:
        raise ValueError("no summaries to write")
    _write_csv(path, SUMMARY_HEADER, summary_rows(summaries))
    return Path(path)


def read_summary_csv(path) -> list[dict[str, float]]:
    with open(path, encoding="utf-8", newline="") as fh:
        return [{k: float(v) for k, v in row.items()} for row in csv.DictReader(fh)]


def group_scores(summary: SettingSummary) -> dict[str, np.ndarray]:
    """Per-group values the selection rule compares: ``rel / theta`` and raw noise."""
    return {
        "relevant": summary.rel_gain_samples / summary.setting.theta,
        "noise": summary.noise_gain_samples,
    }


def histogram_table(summaries: Sequence[SettingSummary], bins: int) -> list[dict]:
    """Fixed-width histograms of selection scores for heatmap rendering.

    Panels are ``(theta, p_rel, p_noise)``. Within a panel and group the
    bin edges span the pooled range of all its ``beta`` settings, so the
    rows of one panel share an axis. Missing values (no noise features)
    are skipped.
    """
    if bins < 2:
        raise ValueError(f"bins must be >= 2, got {bins}")
    panels: dict[tuple, list[SettingSummary]] = {}
    for s in summaries:
        c = s.setting
        panels.setdefault((c.theta, c.p_rel, c.p_noise), []).append(s)

    table = []
    for (theta, p_rel, p_noise), members in panels.items():
        for group in ("relevant", "noise"):
            samples = [group_scores(s)[group] for s in members]
            finite = [v[np.isfinite(v)] for v in samples]
            pooled = np.concatenate(finite)
            if pooled.size == 0:
                continue
            edges = np.histogram_bin_edges(pooled, bins=bins, range=(pooled.min(), pooled.max()))
            for s, values in zip(members, finite):
                counts, _ = np.histogram(values, bins=edges)
                for b, n in enumerate(counts):
                    table.append({
                        "theta": theta, "p_rel": p_rel, "p_noise": p_noise, "group": group,
                        "beta": s.setting.beta, "bin": b,
                        "bin_lo": float(edges[b]), "bin_hi": float(edges[b + 1]), "count": int(n),
                    })
    return table


def emit_distribution_data(summaries: Sequence[SettingSummary], path, bins: int = DEFAULT_BINS) -> tuple[Path, Path]:
    """Write raw gain samples and per-panel histograms.

    ``setting_id`` in the samples file is the position in ``summaries``.
    ``path`` is either a directory (files ``distributions.csv`` and
    ``histograms.csv`` inside it) or the samples file, in which case the
    histograms go next to it as ``histograms.csv``.
    """
    if bins < 2:
        raise ValueError(f"bins must be >= 2, got {bins}")
    path = Path(path)
    if path.is_dir():
        samples_path, hist_path = path / "distributions.csv", path / "histograms.csv"
    else:
        samples_path, hist_path = path, path.with_name("histograms.csv")

    def sample_rows():
        for k, s in enumerate(summaries):
            c = s.setting
            head = [fmt(k), fmt(c.theta), fmt(c.p_rel), fmt(c.p_noise), fmt(c.beta)]
            scores = group_scores(s)
            for group, raw in (("relevant", s.rel_gain_samples), ("noise", s.noise_gain_samples)):
                for r, (d, sc) in enumerate(zip(raw, scores[group])):
                    if np.isfinite(d):
                        yield head + [str(r), group, fmt(d), fmt(sc)]

    _write_csv(samples_path, DISTRIBUTION_HEADER, sample_rows())
    _write_csv(
        hist_path,
        HISTOGRAM_HEADER,
        ([fmt(row[k]) if k != "group" else row[k] for k in HISTOGRAM_HEADER] for row in histogram_table(summaries, bins)),
    )
    return samples_path, hist_path


def manifest_document(manifest: RunManifest, resolved: dict) -> dict:
    doc = asdict(manifest)
    doc["resolved_config"] = resolved
    return doc


def emit_manifest(manifest: RunManifest, resolved: dict, path) -> Path:
    text = json.dumps(manifest_document(manifest, resolved), indent=2, sort_keys=True, allow_nan=False)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text + "\n")
    return Path(path)


def verify_manifest(path) -> bool:
    """Whether the digest in a manifest file matches its embedded resolved config."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    return doc["config_digest"] == config_digest(doc["resolved_config"])
