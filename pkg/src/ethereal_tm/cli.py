"""Command-line pipeline: booleanize, train, infer, eval, heatmap.

Every flag can also come from a config file (flat ``key = value`` lines or
JSON, including a previously written manifest); explicit flags win.  Each
run that writes files also writes a deterministic manifest recording the
resolved parameters and the sha256 of every input and output, so any run
can be reproduced byte for byte from its manifest.
"""

import argparse
import csv
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from .booleanize import (ONE_HOT, THERMOMETER, booleanize, booleanize_grayscale,
                         fit_quantile_bins, read_binning_spec, write_binning_spec)
from .data import load_csv, load_idx, read_lit, write_lit
from .ethereal import ExclusionSchedule, ethereal_train, vanilla_train, write_trace_csv
from .evaluate import accuracy, write_heatmap_csv
from .sparse import model_metrics, read_model, sparse_predict_batch, write_model
from .tm import Hyperparams, read_bank, write_bank


def _as_bool(value):
    if isinstance(value, bool):
        return value
    if isinstance(value, str):
        low = value.strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
    raise ValueError(f"expected a boolean, got {value!r}")


def _as_pair(value):
    if isinstance(value, str):
        value = value.split()
    value = [str(v) for v in value]
    if len(value) != 2:
        raise ValueError(f"expected two paths, got {value!r}")
    return value


def _as_encoding(value):
    value = str(value)
    if value not in (ONE_HOT, THERMOMETER):
        raise ValueError(f"encoding must be {ONE_HOT!r} or {THERMOMETER!r}")
    return value


def _load_config(path):
    text = Path(path).read_text(encoding="utf-8")
    if str(path).endswith(".json"):
        payload = json.loads(text)
        if not isinstance(payload, dict):
            raise ValueError(f"{path}: config JSON must be an object")
        if isinstance(payload.get("params"), dict):
            return dict(payload["params"])
        return payload
    config = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, value = stripped.partition("=")
        if not sep:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        config[key.strip()] = value.strip()
    return config


def _resolve(args, config, spec):
    """Merge flag values, config values, and defaults; flags win.

    spec rows are (name, cast, default, required); unknown config keys are
    rejected so typos fail loudly.
    """
    known = {name for name, _, _, _ in spec}
    unknown = sorted(set(config) - known)
    if unknown:
        raise ValueError(f"unknown config keys for this command: {', '.join(unknown)}")
    resolved = {}
    for name, cast, default, required in spec:
        value = getattr(args, name)
        if value is None and name in config:
            value = config[name]
        if value is None:
            value = default
        if value is None:
            if required:
                raise ValueError(f"missing required parameter '{name}'")
        else:
            value = cast(value)
        resolved[name] = value
    return resolved


def _sha256(path):
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def _write_manifest(command, params, inputs, outputs):
    """Reproducibility record next to the primary output (outputs[0])."""
    manifest = {
        "command": command,
        "params": {k: v for k, v in params.items() if v is not None},
        "inputs": {str(p): _sha256(p) for p in inputs},
        "outputs": {str(p): _sha256(p) for p in outputs},
    }
    if "seed" in params:
        manifest["seed"] = params["seed"]
    path = str(outputs[0]) + ".manifest.json"
    Path(path).write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n",
                          encoding="utf-8")


def _cmd_booleanize(args, config):
    params = _resolve(args, config, [
        ("input", str, None, False),
        ("idx", _as_pair, None, False),
        ("out", str, None, True),
        ("bins", int, None, False),
        ("encoding", _as_encoding, THERMOMETER, True),
        ("threshold", float, 75.0, True),
        ("has_header", _as_bool, False, True),
        ("spec_in", str, None, False),
        ("spec_out", str, None, False),
    ])
    if (params["input"] is None) == (params["idx"] is None):
        raise ValueError("provide exactly one of --input (CSV) or --idx (images labels)")
    inputs = []
    outputs = [params["out"]]
    if params["input"] is not None:
        raw = load_csv(params["input"], has_header=params["has_header"])
        inputs.append(params["input"])
        if params["spec_in"] is not None:
            spec = read_binning_spec(params["spec_in"])
            inputs.append(params["spec_in"])
        else:
            if params["bins"] is None:
                raise ValueError("--bins is required when no --spec-in is given")
            spec = fit_quantile_bins(raw, params["bins"], params["encoding"])
        matrix = booleanize(raw, spec)
        write_lit(matrix, params["out"])
        if params["spec_out"] is not None:
            write_binning_spec(spec, params["spec_out"])
            outputs.append(params["spec_out"])
    else:
        images_path, labels_path = params["idx"]
        raw = load_idx(images_path, labels_path)
        inputs.extend([images_path, labels_path])
        matrix = booleanize_grayscale(raw, params["threshold"])
        write_lit(matrix, params["out"])
    print(f"wrote {params['out']}: {matrix.n_samples} samples, "
          f"{matrix.n_literals} literals, {matrix.n_classes} classes")
    _write_manifest("booleanize", params, inputs, outputs)
    return 0


def _cmd_train(args, config):
    params = _resolve(args, config, [
        ("data", str, None, True),
        ("eval_data", str, None, False),
        ("out", str, None, True),
        ("trace", str, None, False),
        ("bank_out", str, None, False),
        ("clauses", int, None, True),
        ("T", int, None, True),
        ("s", float, None, True),
        ("states", int, 256, True),
        ("epochs", int, None, True),
        ("seed", int, 0, True),
        ("ethereal", _as_bool, False, True),
        ("warmup", int, 1, True),
        ("interval", int, 1, True),
    ])
    if params["states"] < 2 or params["states"] % 2 != 0:
        raise ValueError("--states is the total automaton depth 2N and must be even")
    train_data = read_lit(params["data"])
    inputs = [params["data"]]
    eval_data = None
    if params["eval_data"] is not None:
        eval_data = read_lit(params["eval_data"])
        inputs.append(params["eval_data"])
    hyper = Hyperparams(n_classes=train_data.n_classes,
                        clauses_per_class=params["clauses"],
                        threshold=params["T"], specificity=params["s"],
                        n_states=params["states"] // 2,
                        seed=params["seed"], total_epochs=params["epochs"])
    rng = np.random.default_rng(params["seed"])
    if params["ethereal"]:
        schedule = ExclusionSchedule(params["warmup"], params["interval"], params["epochs"])
        bank, trace = ethereal_train(train_data, hyper, schedule, rng, eval_data)
    else:
        bank, trace = vanilla_train(train_data, hyper, rng, eval_data)
    best_accuracy, best_includes, model = trace.best_snapshot
    write_model(model, params["out"])
    outputs = [params["out"]]
    if params["trace"] is not None:
        write_trace_csv(trace, params["trace"])
        outputs.append(params["trace"])
    if params["bank_out"] is not None:
        write_bank(bank, params["bank_out"])
        outputs.append(params["bank_out"])
    metrics = model_metrics(model)
    print(f"best accuracy={best_accuracy!r} includes_per_clause={best_includes!r} "
          f"size_bytes={metrics['size_bytes']} literal_reads={metrics['literal_reads']}")
    _write_manifest("train", params, inputs, outputs)
    return 0


def _cmd_infer(args, config):
    params = _resolve(args, config, [
        ("model", str, None, True),
        ("data", str, None, True),
        ("out", str, None, True),
    ])
    model = read_model(params["model"])
    matrix = read_lit(params["data"])
    predicted, _ = sparse_predict_batch(model, matrix.bits)
    with open(params["out"], "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "predicted"])
        for i, label in enumerate(predicted):
            writer.writerow([i, int(label)])
    print(f"wrote {params['out']}: {len(predicted)} predictions")
    _write_manifest("infer", params, [params["model"], params["data"]], [params["out"]])
    return 0


def _cmd_eval(args, config):
    params = _resolve(args, config, [
        ("model", str, None, True),
        ("data", str, None, True),
    ])
    model = read_model(params["model"])
    matrix = read_lit(params["data"])
    metrics = model_metrics(model)
    print(f"accuracy={accuracy(model, matrix)!r}")
    print(f"includes_per_clause={metrics['includes_per_clause']!r}")
    print(f"size_bytes={metrics['size_bytes']}")
    print(f"literal_reads={metrics['literal_reads']}")
    return 0


def _cmd_heatmap(args, config):
    params = _resolve(args, config, [
        ("bank_dump", str, None, True),
        ("class_index", int, None, True),
        ("out", str, None, True),
    ])
    bank = read_bank(params["bank_dump"])
    write_heatmap_csv(bank, params["class_index"], params["out"])
    print(f"wrote {params['out']}: {bank.n_literals} literals, "
          f"class {params['class_index']}")
    _write_manifest("heatmap", params, [params["bank_dump"]], [params["out"]])
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="ethereal-tm",
        description="Tsetlin Machine training, exclusion-based compression, "
                    "and include-only inference.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("booleanize", help="encode a raw dataset as literals")
    p.add_argument("--input", help="CSV with real features, integer label last")
    p.add_argument("--idx", nargs=2, metavar=("IMAGES", "LABELS"),
                   help="IDX image and label archives (gzipped or plain)")
    p.add_argument("--bins", type=int, help="quantile bins per feature (CSV mode)")
    p.add_argument("--encoding", choices=(ONE_HOT, THERMOMETER))
    p.add_argument("--threshold", type=float, help="grayscale cutoff (IDX mode)")
    p.add_argument("--has-header", action="store_true", default=None, dest="has_header")
    p.add_argument("--spec-in", dest="spec_in", help="reuse a saved binning spec")
    p.add_argument("--spec-out", dest="spec_out", help="save the fitted binning spec")
    p.add_argument("--out", help="output .lit path")
    p.add_argument("--config")
    p.set_defaults(func=_cmd_booleanize)

    p = sub.add_parser("train", help="train a model and export the best snapshot")
    p.add_argument("--data", help="training .lit file")
    p.add_argument("--eval-data", dest="eval_data",
                   help="held-out .lit scored per epoch (defaults to --data)")
    p.add_argument("--clauses", type=int, help="clauses per class (even)")
    p.add_argument("--T", type=int, help="vote clamp")
    p.add_argument("--s", type=float, help="specificity")
    p.add_argument("--states", type=int, help="total automaton depth 2N (default 256)")
    p.add_argument("--epochs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--ethereal", action="store_true", default=None,
                   help="interleave exclusion sweeps with training")
    p.add_argument("--warmup", type=int, help="epochs before the first exclusion")
    p.add_argument("--interval", type=int, help="epochs between exclusions")
    p.add_argument("--out", help="output model (.ethl)")
    p.add_argument("--trace", help="per-epoch trace CSV")
    p.add_argument("--bank-out", dest="bank_out", help="raw state dump for heatmaps")
    p.add_argument("--config")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("infer", help="predict labels with a compressed model")
    p.add_argument("--model", help=".ethl model file")
    p.add_argument("--data", help=".lit file to predict")
    p.add_argument("--out", help="output predictions CSV")
    p.add_argument("--config")
    p.set_defaults(func=_cmd_infer)

    p = sub.add_parser("eval", help="score a model and report its size")
    p.add_argument("--model", help=".ethl model file")
    p.add_argument("--data", help="labeled .lit file")
    p.add_argument("--config")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("heatmap", help="per-literal include counts of one class")
    p.add_argument("--bank-dump", dest="bank_dump", help="state dump from train --bank-out")
    p.add_argument("--class", dest="class_index", type=int, help="class index")
    p.add_argument("--out", help="output heatmap CSV")
    p.add_argument("--config")
    p.set_defaults(func=_cmd_heatmap)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = _load_config(args.config) if args.config else {}
        return args.func(args, config)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
