"""Command-line surface chaining the toolkit into an audit pipeline.

Subcommands: synth, metrics, report, eo-fit, eo-apply, debias,
ensemble-fit, ensemble-predict, pipeline.  Every run writes a manifest
(inputs, output hashes, seeds, version) into the output directory.  All
data outputs are deterministic given the arguments; wall-clock time is
recorded only in the manifest.

On failure a single machine-parsable line ``<category>: <message>`` is
printed to stderr and the process exits with the category's code.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .debias import hard_debias, load_embeddings, save_embeddings
from .ensemble import EnsembleModel, fit_ensemble, predict_proba
from .eo import (
    LossSpec,
    apply_hard,
    apply_soft,
    derive_seed,
    expected_rates,
    fit_eo_hard,
    fit_eo_soft,
    load_derived_predictor,
)
from .errors import EquifairError, ValidationError
from .metrics import FairnessReport, build_report
from .predictions import (
    LabeledPredictions,
    read_prediction_file,
    write_predictions,
)
from .synth import (
    CohortConfig,
    EmbeddingPlantConfig,
    GROUP_PRESETS,
    gapped_score_models,
    generate_cohort,
    generate_embeddings,
)
from .wordsets import resolve_equality_sets

INTERVENTIONS = ("none", "eo-hard", "eo-soft", "debias")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_manifest(out_dir: Path, command: str, args: dict, inputs: list[Path], outputs: list[Path], seed: int | None) -> Path:
    manifest = {
        "command": command,
        "arguments": {
            k: (str(v) if isinstance(v, Path) else v)
            for k, v in args.items()
            if k != "func" and (v is None or isinstance(v, (str, int, float, bool, Path)))
        },
        "inputs": {str(p): _sha256(Path(p)) for p in inputs if Path(p).exists()},
        "outputs": {str(p): _sha256(Path(p)) for p in outputs},
        "seed": seed,
        "version": __version__,
        "created_at": datetime.now(timezone.utc).isoformat(),
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("EQUIFAIR_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ValidationError(f"EQUIFAIR_SEED must be an integer, got {env!r}") from None
    return 0


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_cohort_config(args, seed: int) -> CohortConfig:
    if getattr(args, "synth_config", None):
        doc = json.loads(Path(args.synth_config).read_text(encoding="utf-8"))
        return CohortConfig.from_dict(doc)
    groups = GROUP_PRESETS[args.preset]
    models = gapped_score_models(groups, tpr_low=args.tpr_low, tpr_high=args.tpr_high, fpr=args.fpr)
    windows = tuple(
        tuple(float(x) for x in w.split(":")) for w in args.modality_windows.split(",")
    )
    return CohortConfig(
        groups=groups,
        positive_rate=args.positive_rate,
        score_models=models,
        n_samples=args.n,
        seed=seed,
        modality_windows=windows,
    )


def _plot_data_csv(report: FairnessReport, classifier: str) -> str:
    """Tidy (classifier, group, metric, value) rows for range plots."""
    lines = ["classifier,group,metric,value"]
    if report.group_rates is not None:
        for g, e in report.group_rates:
            if e.tpr is not None:
                lines.append(f"{classifier},{g},tpr,{e.tpr!r}")
            if e.tnr is not None:
                lines.append(f"{classifier},{g},tnr,{e.tnr!r}")
    for g, auc in report.auc_roc_per_group.items():
        if auc is not None:
            lines.append(f"{classifier},{g},auc_roc,{auc!r}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# subcommands


def _cmd_synth(args) -> int:
    seed = _resolve_seed(args)
    out = _out_dir(args)
    outputs = []
    if args.plant_embeddings:
        sets = resolve_equality_sets(args.equality_sets)
        cfg = EmbeddingPlantConfig(
            equality_sets=sets.sets,
            vocab_size=args.vocab,
            dim=args.dim,
            noise=args.noise,
            seed=seed,
        )
        emb, _, planted = generate_embeddings(cfg)
        emb_path = out / "embeddings.txt"
        save_embeddings(emb, emb_path)
        outputs.append(emb_path)
        sidecar = out / "planted_subspace.json"
        sidecar.write_text(
            json.dumps({"basis": planted.basis.tolist(), "noise": args.noise}, indent=2) + "\n",
            encoding="utf-8",
        )
        outputs.append(sidecar)
        _write_manifest(out, "synth", vars(args), [], outputs, seed)
        print(f"wrote planted embeddings ({len(emb)} words, dim {emb.dim}) to {out}")
        return 0
    cfg = _load_cohort_config(args, seed)
    cohort = generate_cohort(cfg)
    for m, preds in enumerate(cohort.modalities):
        path = out / f"modality_{m}.csv"
        write_predictions(preds, path)
        outputs.append(path)
    sidecar = out / "analytic_rates.json"
    sidecar.write_text(cohort.sidecar_json(), encoding="utf-8")
    outputs.append(sidecar)
    _write_manifest(out, "synth", vars(args), [], outputs, seed)
    print(f"wrote {len(cohort.modalities)} modality file(s) to {out}")
    return 0


def _cmd_metrics(args) -> int:
    preds = read_prediction_file(Path(args.input), group_col=args.group_col).predictions
    report = build_report(preds, task=args.task)
    sys.stdout.write(report.to_json())
    return 0


def _cmd_report(args) -> int:
    out = _out_dir(args)
    preds = read_prediction_file(Path(args.input), group_col=args.group_col).predictions
    report = build_report(preds, task=args.task, seed=getattr(args, "seed", None))
    report_path = out / "report.json"
    report_path.write_text(report.to_json(), encoding="utf-8")
    plot_path = out / "plot_data.csv"
    plot_path.write_text(_plot_data_csv(report, args.task or "classifier"), encoding="utf-8")
    _write_manifest(out, "report", vars(args), [Path(args.input)], [report_path, plot_path], getattr(args, "seed", None))
    print(f"wrote {report_path}")
    return 0


def _cmd_eo_fit(args) -> int:
    out = _out_dir(args)
    preds = read_prediction_file(Path(args.input), group_col=args.group_col).predictions
    loss = LossSpec(cost_fp=args.cost_fp, cost_fn=args.cost_fn)
    dp = fit_eo_hard(preds, loss) if args.variant == "hard" else fit_eo_soft(preds, loss)
    dp_path = out / "derived_predictor.json"
    dp_path.write_text(dp.to_json(), encoding="utf-8")
    _write_manifest(out, "eo-fit", vars(args), [Path(args.input)], [dp_path], None)
    print(f"wrote {dp_path} (target fpr={dp.target[0]:.6f} tpr={dp.target[1]:.6f})")
    return 0


def _cmd_eo_apply(args) -> int:
    seed = _resolve_seed(args)
    out = _out_dir(args)
    preds = read_prediction_file(Path(args.input), group_col=args.group_col).predictions
    dp = load_derived_predictor(json.loads(Path(args.predictor).read_text(encoding="utf-8")))
    if dp.to_dict()["variant"] == "hard":
        y_tilde = apply_hard(dp, preds, seed)
    else:
        y_tilde = apply_soft(dp, preds, seed)
    adjusted = LabeledPredictions(
        ids=preds.ids,
        y_true=preds.y_true,
        groups=preds.groups,
        scores=None,
        y_hat=y_tilde,
        universe=preds.universe,
    )
    out_path = out / "postprocessed.csv"
    write_predictions(adjusted, out_path)
    _write_manifest(out, "eo-apply", vars(args), [Path(args.input), Path(args.predictor)], [out_path], seed)
    print(f"wrote {out_path}")
    return 0


def _cmd_debias(args) -> int:
    out = _out_dir(args)
    emb = load_embeddings(Path(args.embeddings))
    sets = resolve_equality_sets(args.equality_sets)
    result = hard_debias(emb, sets, k=args.k)
    emb_path = out / "debiased_embeddings.txt"
    save_embeddings(result.embeddings, emb_path)
    report_path = out / "debias_report.json"
    report_path.write_text(json.dumps(result.skip_report(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    _write_manifest(out, "debias", vars(args), [Path(args.embeddings)], [emb_path, report_path], None)
    print(f"wrote {emb_path} ({len(result.neutralized)} neutralized, {len(result.equalized_sets)} sets equalized)")
    return 0


def _cmd_ensemble_fit(args) -> int:
    out = _out_dir(args)
    pfile = read_prediction_file(Path(args.input), group_col=args.group_col)
    if not pfile.constituent_scores:
        raise ValidationError("ensemble-fit needs score_<name> constituent columns")
    model = fit_ensemble(pfile.feature_matrix(), pfile.predictions.y_true, C=args.C)
    model_path = out / "ensemble_model.json"
    doc = model.to_dict()
    doc["constituents"] = list(pfile.constituent_names)
    model_path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    _write_manifest(out, "ensemble-fit", vars(args), [Path(args.input)], [model_path], None)
    print(f"wrote {model_path} (converged={model.converged}, iterations={model.n_iter})")
    return 0


def _cmd_ensemble_predict(args) -> int:
    out = _out_dir(args)
    pfile = read_prediction_file(Path(args.input), group_col=args.group_col)
    doc = json.loads(Path(args.model).read_text(encoding="utf-8"))
    model = EnsembleModel.from_dict(doc)
    names = doc.get("constituents")
    if names:
        missing = [n for n in names if n not in pfile.constituent_scores]
        if missing:
            raise ValidationError(f"input lacks constituent columns {missing}")
        features = np.column_stack([pfile.constituent_scores[n] for n in names])
    else:
        features = pfile.feature_matrix()
    scores = predict_proba(model, features)
    combined = LabeledPredictions(
        ids=pfile.predictions.ids,
        y_true=pfile.predictions.y_true,
        groups=pfile.predictions.groups,
        scores=scores,
        y_hat=(scores >= args.threshold).astype(np.int8),
        universe=pfile.predictions.universe,
    )
    out_path = out / "ensemble_predictions.csv"
    write_predictions(combined, out_path)
    _write_manifest(out, "ensemble-predict", vars(args), [Path(args.input), Path(args.model)], [out_path], None)
    print(f"wrote {out_path}")
    return 0


def _ensemble_scores(fit_preds, fit_features, eval_features, C: float):
    model = fit_ensemble(fit_features, fit_preds.y_true, C=C)
    return model, predict_proba(model, eval_features)


def _cmd_pipeline(args) -> int:
    seed = _resolve_seed(args)
    out = _out_dir(args)
    interventions = [v for v in args.intervention.split("+") if v]
    for v in interventions:
        if v not in INTERVENTIONS:
            raise ValidationError(f"unknown intervention {v!r}")
    if len(interventions) != 1 and not args.allow_composition:
        raise ValidationError(
            "exactly one intervention per run; pass --allow-composition to override"
        )
    loss = LossSpec(cost_fp=args.cost_fp, cost_fn=args.cost_fn)
    inputs: list[Path] = []
    outputs: list[Path] = []
    metadata: dict = {"interventions": interventions, "costs": {"fp": args.cost_fp, "fn": args.cost_fn}}
    if not set(interventions) <= {"none", "debias"} and args.allow_composition and "debias" in interventions:
        metadata["composition_warning"] = "combining embedding debiasing with output post-processing is out-of-protocol usage"

    # acquire fit and eval prediction sets
    if args.input:
        eval_file = read_prediction_file(Path(args.input), group_col=args.group_col)
        inputs.append(Path(args.input))
        if args.fit_input:
            fit_file = read_prediction_file(Path(args.fit_input), group_col=args.group_col)
            inputs.append(Path(args.fit_input))
            metadata["fit_split"] = str(args.fit_input)
        else:
            fit_file = eval_file
            metadata["fit_split"] = "eval (no separate fit input provided)"
        fit_preds, eval_preds = fit_file.predictions, eval_file.predictions
        fit_features = fit_file.constituent_scores
        eval_features = eval_file.constituent_scores
    else:
        base_cfg = _load_cohort_config(args, seed)
        fit_cohort = generate_cohort(
            CohortConfig.from_dict({**base_cfg.to_dict(), "seed": derive_seed(seed, "fit")})
        )
        eval_cohort = generate_cohort(
            CohortConfig.from_dict({**base_cfg.to_dict(), "seed": derive_seed(seed, "eval")})
        )
        metadata["fit_split"] = "synthetic (derived seed)"
        if len(fit_cohort.modalities) == 1:
            fit_preds, eval_preds = fit_cohort.modalities[0], eval_cohort.modalities[0]
            fit_features = eval_features = {}
        else:
            fit_preds, eval_preds = fit_cohort.modalities[0], eval_cohort.modalities[0]
            fit_features = {
                f"m{j}": m.scores for j, m in enumerate(fit_cohort.modalities)
            }
            eval_features = {
                f"m{j}": m.scores for j, m in enumerate(eval_cohort.modalities)
            }

    # ensemble stage when constituent scores are available
    if fit_features and eval_features:
        names = sorted(set(fit_features) & set(eval_features))
        if not names:
            raise ValidationError("fit and eval constituent columns do not overlap")
        model, scores = _ensemble_scores(
            fit_preds,
            np.column_stack([fit_features[n] for n in names]),
            np.column_stack([eval_features[n] for n in names]),
            args.C,
        )
        model_path = out / "ensemble_model.json"
        doc = model.to_dict()
        doc["constituents"] = names
        model_path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        outputs.append(model_path)
        eval_preds = LabeledPredictions(
            ids=eval_preds.ids,
            y_true=eval_preds.y_true,
            groups=eval_preds.groups,
            scores=scores,
            y_hat=(scores >= 0.5).astype(np.int8),
            universe=eval_preds.universe,
        )
        fit_scores = predict_proba(model, np.column_stack([fit_features[n] for n in names]))
        fit_preds = LabeledPredictions(
            ids=fit_preds.ids,
            y_true=fit_preds.y_true,
            groups=fit_preds.groups,
            scores=fit_scores,
            y_hat=(fit_scores >= 0.5).astype(np.int8),
            universe=fit_preds.universe,
        )
        metadata["ensemble"] = {"constituents": names, "C": args.C}

    # debias stage (embedding-space intervention; predictions pass through)
    if "debias" in interventions:
        if not args.embeddings:
            raise ValidationError("intervention 'debias' requires --embeddings")
        emb = load_embeddings(Path(args.embeddings))
        inputs.append(Path(args.embeddings))
        sets = resolve_equality_sets(args.equality_sets)
        result = hard_debias(emb, sets, k=args.k)
        emb_path = out / "debiased_embeddings.txt"
        save_embeddings(result.embeddings, emb_path)
        outputs.append(emb_path)
        dreport_path = out / "debias_report.json"
        dreport_path.write_text(json.dumps(result.skip_report(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        outputs.append(dreport_path)
        metadata["debias"] = {"equality_sets": args.equality_sets, "k": result.subspace.k}

    base_report = build_report(eval_preds, task=args.task, seed=seed, extra_metadata=metadata)
    base_path = out / "base_report.json"
    base_path.write_text(base_report.to_json(), encoding="utf-8")
    outputs.append(base_path)
    plot_rows = [_plot_data_csv(base_report, "base")]

    eo_variant = next((v for v in interventions if v.startswith("eo-")), None)
    if eo_variant:
        if fit_preds.y_hat is None and eo_variant == "eo-hard":
            raise ValidationError("eo-hard requires hard predictions in the fit split")
        dp = fit_eo_hard(fit_preds, loss) if eo_variant == "eo-hard" else fit_eo_soft(fit_preds, loss)
        dp_path = out / "derived_predictor.json"
        dp_path.write_text(dp.to_json(), encoding="utf-8")
        outputs.append(dp_path)
        apply_seed = derive_seed(seed, "apply")
        if eo_variant == "eo-hard":
            y_tilde = apply_hard(dp, eval_preds, apply_seed)
        else:
            y_tilde = apply_soft(dp, eval_preds, apply_seed)
        post_preds = LabeledPredictions(
            ids=eval_preds.ids,
            y_true=eval_preds.y_true,
            groups=eval_preds.groups,
            scores=None,
            y_hat=y_tilde,
            universe=eval_preds.universe,
        )
        post_csv = out / "postprocessed.csv"
        write_predictions(post_preds, post_csv)
        outputs.append(post_csv)
        post_meta = dict(metadata)
        post_meta["expected_rates"] = expected_rates(dp).to_dict()
        post_meta["eo_objective"] = dp.objective
        post_report = build_report(post_preds, task=args.task, seed=seed, extra_metadata=post_meta)
        post_path = out / "post_report.json"
        post_path.write_text(post_report.to_json(), encoding="utf-8")
        outputs.append(post_path)
        plot_rows.append(_plot_data_csv(post_report, eo_variant))

    plot_path = out / "plot_data.csv"
    header, *_ = plot_rows[0].splitlines()
    body = [header]
    for block in plot_rows:
        body.extend(block.splitlines()[1:])
    plot_path.write_text("\n".join(body) + "\n", encoding="utf-8")
    outputs.append(plot_path)
    _write_manifest(out, "pipeline", vars(args), inputs, outputs, seed)
    print(f"pipeline complete: {len(outputs)} artifact(s) in {out}")
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_common_io(p, with_group=True):
    p.add_argument("--input", required=True, help="prediction CSV path")
    if with_group:
        p.add_argument("--group-col", default="group", help="sensitive-attribute column name")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="equifair", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic cohort or planted embeddings")
    p.add_argument("--preset", choices=sorted(GROUP_PRESETS), default="sex")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--positive-rate", type=float, default=0.131)
    p.add_argument("--tpr-low", type=float, default=0.60)
    p.add_argument("--tpr-high", type=float, default=0.85)
    p.add_argument("--fpr", type=float, default=0.15)
    p.add_argument("--modality-windows", default="0:1", help='e.g. "0:0.5,0.5:1"')
    p.add_argument("--synth-config", help="JSON cohort config (overrides other flags)")
    p.add_argument("--plant-embeddings", action="store_true", help="emit a planted-bias embedding file instead of a cohort")
    p.add_argument("--equality-sets", default="gender")
    p.add_argument("--vocab", type=int, default=50)
    p.add_argument("--dim", type=int, default=25)
    p.add_argument("--noise", type=float, default=0.01)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("metrics", help="print a fairness report to stdout")
    _add_common_io(p)
    p.add_argument("--task", default="")
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("report", help="write report.json and plot_data.csv")
    _add_common_io(p)
    p.add_argument("--task", default="")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("eo-fit", help="fit an equalized-odds derived predictor")
    _add_common_io(p)
    p.add_argument("--variant", choices=("hard", "soft"), required=True)
    p.add_argument("--cost-fp", type=float, default=1.0)
    p.add_argument("--cost-fn", type=float, default=1.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_eo_fit)

    p = sub.add_parser("eo-apply", help="apply a fitted derived predictor")
    _add_common_io(p)
    p.add_argument("--predictor", required=True, help="derived_predictor.json path")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_eo_apply)

    p = sub.add_parser("debias", help="hard-debias an embedding file")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--equality-sets", default="gender", help="preset name (gender, race) or JSON path")
    p.add_argument("--k", type=int, default=None, help="bias-subspace dimension")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_debias)

    p = sub.add_parser("ensemble-fit", help="fit the logistic score combiner")
    _add_common_io(p)
    p.add_argument("--C", type=float, default=1.0, help="inverse regularization strength")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_ensemble_fit)

    p = sub.add_parser("ensemble-predict", help="combine constituent scores")
    _add_common_io(p)
    p.add_argument("--model", required=True)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_ensemble_predict)

    p = sub.add_parser("pipeline", help="end-to-end audit run")
    p.add_argument("--task", default="audit")
    p.add_argument("--input", help="eval prediction CSV (omit to synthesize)")
    p.add_argument("--fit-input", help="prediction CSV for fitting stages")
    p.add_argument("--group-col", default="group")
    p.add_argument("--intervention", default="none", help="none | eo-hard | eo-soft | debias (combine with + and --allow-composition)")
    p.add_argument("--allow-composition", action="store_true")
    p.add_argument("--cost-fp", type=float, default=1.0)
    p.add_argument("--cost-fn", type=float, default=1.0)
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--embeddings")
    p.add_argument("--equality-sets", default="gender")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--preset", choices=sorted(GROUP_PRESETS), default="sex")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--positive-rate", type=float, default=0.131)
    p.add_argument("--tpr-low", type=float, default=0.60)
    p.add_argument("--tpr-high", type=float, default=0.85)
    p.add_argument("--fpr", type=float, default=0.15)
    p.add_argument("--modality-windows", default="0:1")
    p.add_argument("--synth-config")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_pipeline)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EquifairError as exc:
        print(f"{exc.category}: {exc}", file=sys.stderr)
        return exc.exit_code
    except FileNotFoundError as exc:
        print(f"missing-file: {exc}", file=sys.stderr)
        return 3
    except json.JSONDecodeError as exc:
        print(f"format-error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
