"""Batch command line: segment, seeds, eval, eval-batch, corr, phantom, serve.

Exit codes: 0 success, 1 operational error (single-line reason on stderr),
2 usage error.
"""

from __future__ import annotations

import json
import re
import sys
from pathlib import Path

import click

from .affinity import AffinityParams
from .errors import LungFieldError
from .metrics import (
    dice_coefficient,
    overlap_coefficient,
    pearson_correlation_matrix,
    read_overlap_manifest,
    read_volume_records,
    render_correlation_table,
    render_overlap_table,
    summary_stats,
    volume_ml,
)
from .nifti_io import load_mask, load_volume, save_labels, save_mask, save_volume
from .phantom import PhantomSpec, generate_thorax_phantom
from .seeding import SeedSet, candidate_regions, extract_body_mask, extract_rib_cage, select_seeds, validate_manual_seeds
from .segment import DEFAULT_THETA, auto_segment, segment_lungs

LABEL_RIGHT = 1
LABEL_LEFT = 2


def _fail(err: Exception) -> None:
    code = getattr(err, "code", "io_error" if isinstance(err, OSError) else "error")
    message = str(err).replace("\n", " ")
    click.echo(f"error: {code}: {message}", err=True)
    sys.exit(1)


def _params(mean: float, sigma: float, adjacency: int) -> AffinityParams:
    return AffinityParams(mean_hu=mean, sigma_hu=sigma, adjacency=adjacency)


def _parse_seed_spec(raw: str) -> SeedSet:
    """Seeds as inline JSON or a path to a JSON file:
    {"left": [[x,y,z], ...], "right": [[x,y,z], ...]}"""
    text = raw if raw.lstrip().startswith("{") else Path(raw).read_text()
    data = json.loads(text)
    return SeedSet(
        left=tuple(tuple(int(v) for v in c) for c in data.get("left", [])),
        right=tuple(tuple(int(v) for v in c) for c in data.get("right", [])),
        provenance="manual-click",
    )


@click.group()
def main():
    """Lung-field annotation toolkit."""


@main.command()
@click.argument("volume_path", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", "output_path", required=True, type=click.Path(dir_okay=False))
@click.option("--seeds", "seed_spec", default=None, help="JSON seeds (inline or a file path); default: automatic")
@click.option("--mean", default=-550.0, show_default=True, help="target parenchyma mean HU")
@click.option("--sigma", default=150.0, show_default=True, help="parenchyma spread in HU")
@click.option("--theta", default=DEFAULT_THETA, show_default=True, help="connectivity threshold")
@click.option("--adjacency", default=6, type=click.Choice(["6", "26"]), show_default=True)
@click.option("--per-side", is_flag=True, help="write labels 1 (right) and 2 (left) instead of a binary mask")
def segment(volume_path, output_path, seed_spec, mean, sigma, theta, adjacency, per_side):
    """Segment both lungs and write the mask; prints volumes in mL."""
    try:
        volume = load_volume(volume_path)
        params = _params(mean, sigma, int(adjacency))
        if seed_spec:
            seeds, warnings = validate_manual_seeds(volume, _parse_seed_spec(seed_spec))
            for warning in warnings:
                click.echo(f"warning: {warning}", err=True)
            result = segment_lungs(volume, seeds, params, theta)
        else:
            result = auto_segment(volume, params, theta)
        if per_side:
            save_labels(
                {LABEL_RIGHT: result.right_mask, LABEL_LEFT: result.left_mask}, output_path
            )
        else:
            save_mask(result.combined_mask, output_path)
        click.echo(f"left     {volume_ml(result.left_mask):.1f} mL")
        click.echo(f"right    {volume_ml(result.right_mask):.1f} mL")
        click.echo(f"combined {volume_ml(result.combined_mask):.1f} mL")
    except (LungFieldError, OSError, json.JSONDecodeError, ValueError) as err:
        _fail(err)


@main.command()
@click.argument("volume_path", type=click.Path(exists=True, dir_okay=False))
def seeds(volume_path):
    """Print automatically selected seed voxels as JSON."""
    try:
        volume = load_volume(volume_path)
        body = extract_body_mask(volume)
        ribs = extract_rib_cage(volume, body)
        seed_set = select_seeds(candidate_regions(volume, body, ribs))
        payload = {
            "provenance": seed_set.provenance,
            "left": [
                {"voxel": list(c), "hu": float(volume.values[c])} for c in seed_set.left
            ],
            "right": [
                {"voxel": list(c), "hu": float(volume.values[c])} for c in seed_set.right
            ],
        }
        click.echo(json.dumps(payload, indent=2))
    except (LungFieldError, OSError) as err:
        _fail(err)


@main.command("eval")
@click.argument("reference", type=click.Path(exists=True, dir_okay=False))
@click.argument("predicted", type=click.Path(exists=True, dir_okay=False))
def eval_pair(reference, predicted):
    """Overlap (intersection over union) and Dice between two masks."""
    try:
        ref = load_mask(reference)
        pred = load_mask(predicted)
        click.echo(f"overlap {overlap_coefficient(ref, pred):.3f}")
        click.echo(f"dice    {dice_coefficient(ref, pred):.3f}")
    except (LungFieldError, OSError) as err:
        _fail(err)


def _object_of(case_id: str) -> str:
    """Group per-case scores into report rows: case ids ending in 'left' or
    'right' (after any of _-:/ or whitespace) form per-lung objects; anything
    else pools into a single row."""
    tail = re.split(r"[_\-:/\s]+", case_id.strip())[-1].lower()
    return f"{tail} lung" if tail in ("left", "right") else "all"


@main.command("eval-batch")
@click.argument("manifest", type=click.Path(exists=True, dir_okay=False))
def eval_batch(manifest):
    """Summary table of overlaps for a cohort manifest CSV
    (case_id,reference_path,predicted_path). Case ids ending in left/right
    group into per-lung rows."""
    try:
        rows = read_overlap_manifest(manifest)
        if not rows:
            raise LungFieldError(f"manifest {manifest} has no rows")
        by_object: dict[str, list[float]] = {}
        for case_id, ref_path, pred_path in rows:
            score = overlap_coefficient(load_mask(ref_path), load_mask(pred_path))
            by_object.setdefault(_object_of(case_id), []).append(score)
        summaries = [
            summary_stats(vals, object_name=name) for name, vals in sorted(by_object.items())
        ]
        click.echo(render_overlap_table(summaries))
    except (LungFieldError, OSError, ValueError) as err:
        _fail(err)


@main.command()
@click.argument("volumes_csv", type=click.Path(exists=True, dir_okay=False))
def corr(volumes_csv):
    """Lower-triangular Pearson correlation of per-method volumes
    (case_id,method,volume_ml)."""
    try:
        records = read_volume_records(volumes_csv)
        methods, matrix = pearson_correlation_matrix(records)
        click.echo(render_correlation_table(methods, matrix))
    except (LungFieldError, OSError, ValueError) as err:
        _fail(err)


@main.command()
@click.option("-o", "--output", "output_path", required=True, type=click.Path(dir_okay=False))
@click.option("--size", default=64, show_default=True, help="cubic grid size in voxels")
@click.option("--noise", default=0.0, show_default=True, help="lung noise standard deviation (HU)")
@click.option("--rng-seed", default=0, show_default=True)
@click.option("--spacing", default=1.0, show_default=True, help="isotropic voxel size (mm)")
def phantom(output_path, size, noise, rng_seed, spacing):
    """Generate a synthetic thorax volume plus its truth masks."""
    try:
        spec = PhantomSpec(
            dims=(size, size, size),
            spacing=(spacing, spacing, spacing),
            lung_noise_sd=noise,
            rng_seed=rng_seed,
        )
        volume, truth_left, truth_right = generate_thorax_phantom(spec)
        out = Path(output_path)
        save_volume(volume, out)
        stem = out.name[: -len(".nii.gz")] if out.name.endswith(".nii.gz") else out.stem
        suffix = ".nii.gz" if out.name.endswith(".gz") else ".nii"
        left_path = out.with_name(f"{stem}_truth_left{suffix}")
        right_path = out.with_name(f"{stem}_truth_right{suffix}")
        save_mask(truth_left, left_path)
        save_mask(truth_right, right_path)
        click.echo(f"volume      {out}")
        click.echo(f"truth-left  {left_path}")
        click.echo(f"truth-right {right_path}")
    except (LungFieldError, OSError) as err:
        _fail(err)


@main.command()
@click.option("--port", default=8000, show_default=True, envvar="LUNGFIELD_PORT")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--ui-dir", default=None, type=click.Path(file_okay=False), help="serve a built web UI from this directory (default: frontend/dist if present)")
def serve(port, host, ui_dir):
    """Run the annotation HTTP service (and the web UI when available)."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(ui_dir=ui_dir), host=host, port=port)


if __name__ == "__main__":
    main()
