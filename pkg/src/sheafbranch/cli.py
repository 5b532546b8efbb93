"""Command-line driver.

``sheafbranch run`` turns an image into heat-map, mask, report and optional
diagram files; ``sheafbranch check`` runs the randomized property suites.

Exit status: 0 success, 2 usage, 3 I/O, 4 parse, 5 validation,
6 property failure.
"""
from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .branch import heat_map, short_filtrations
from .checks import SUITES, run_suites
from .errors import ParseError, ValidationError
from .imageio import BinaryImage, extract_patch, load_gray, load_image, threshold
from .persistence import format_diagrams, persistence_diagram

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_PARSE, EXIT_VALIDATION, EXIT_PROPERTY = 0, 2, 3, 4, 5, 6

EMITS = ("pd", "heatmap", "mask", "report")


@dataclass(frozen=True)
class RunConfig:
    input: Path
    format: str = "pbm"
    threshold: str | int = "mean"
    windows: tuple[int, ...] = (10, 20, 30)
    stride: int | None = None
    out: Path = Path("out")
    emit: frozenset[str] = frozenset({"heatmap", "mask", "report"})
    resize: int | None = None

    def __post_init__(self):
        if not self.windows or any(w < 1 for w in self.windows):
            raise ValidationError(f"window sizes must be positive, got {self.windows}")
        if self.stride is not None and self.stride < 1:
            raise ValidationError(f"stride must be positive, got {self.stride}")
        unknown = set(self.emit) - set(EMITS)
        if unknown:
            raise ValidationError(f"unknown emit flags {sorted(unknown)}")


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _stride(text: str) -> int | None:
    if text == "tile":
        return None
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"stride must be 'tile' or an integer, got {text!r}") from None


def _threshold(text: str) -> str | int:
    if text == "mean":
        return "mean"
    if text.startswith("fixed:"):
        try:
            return int(text[6:])
        except ValueError:
            pass
    raise argparse.ArgumentTypeError(f"threshold must be 'mean' or 'fixed:<t>', got {text!r}")


def _emit(text: str) -> frozenset[str]:
    return frozenset(t.strip() for t in text.split(",") if t.strip())


def resize_nearest(image: BinaryImage, size: int) -> BinaryImage:
    mask = image.to_array()
    rows = np.arange(size) * image.height // size
    cols = np.arange(size) * image.width // size
    return BinaryImage.from_array(mask[np.ix_(rows, cols)])


def read_input(config: RunConfig) -> BinaryImage:
    if config.format == "pgm":
        image = threshold(load_gray(config.input), config.threshold)
    else:
        image = load_image(config.input, config.format)
    if config.resize:
        image = resize_nearest(image, config.resize)
    return image


def run(config: RunConfig) -> int:
    """Compute the heat map and write the requested artifacts into ``config.out``."""
    image = read_input(config)
    hm = heat_map(image, config.windows, config.stride)
    out = config.out
    out.mkdir(parents=True, exist_ok=True)
    if "heatmap" in config.emit:
        (out / "heatmap.csv").write_text(hm.to_csv())
        (out / "heatmap.pgm").write_text(hm.to_pgm())
    if "mask" in config.emit:
        (out / "mask.csv").write_text(hm.mask_csv())
    listed = [r for r in hm.windows if r.has_content]
    if "report" in config.emit:
        lines = ["size,x0,y0,x1,y1,branch_number"]
        lines += [f"{r.size},{r.window.x0},{r.window.y0},{r.window.x1},{r.window.y1},{r.branch_number}" for r in listed]
        (out / "report.csv").write_text("\n".join(lines) + "\n")
    if "pd" in config.emit:
        pd_dir = out / "pd"
        pd_dir.mkdir(exist_ok=True)
        for r in listed:
            g1, _ = short_filtrations(extract_patch(image, r.window), image)
            text = format_diagrams([persistence_diagram(g1, 0), persistence_diagram(g1, 1)])
            (pd_dir / f"w{r.size}_x{r.window.x0}_y{r.window.y0}.txt").write_text(text)
    return EXIT_OK


def run_checks(seed: int = 0, scale: float = 1.0, suites=None, corrupt: bool = False) -> int:
    results = run_suites(seed=seed, scale=scale, corrupt=corrupt, names=suites)
    for r in results:
        print(r.line())
        for f in r.failures:
            print(f"  {f}")
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed} suites passed, {failed} failed (seed {seed})")
    return EXIT_PROPERTY if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sheafbranch", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="compute branch-number heat maps for one image")
    r.add_argument("--input", required=True, type=Path)
    r.add_argument("--format", choices=("pbm", "csv", "pgm"), default="pbm",
                   help="pbm: P1/P4 with 1 = black; csv: 0/1 with 0 = black; pgm: grayscale, thresholded")
    r.add_argument("--threshold", type=_threshold, default="mean", help="mean or fixed:<t> (pgm input only)")
    r.add_argument("--windows", type=_int_list, default=(10, 20, 30), help="window sizes, e.g. 10,20,30")
    r.add_argument("--stride", type=_stride, default=None, help="tile (default) or a pixel stride")
    r.add_argument("--out", type=Path, default=Path("out"))
    r.add_argument("--emit", type=_emit, default=frozenset({"heatmap", "mask", "report"}),
                   help="comma-separated subset of pd,heatmap,mask,report")
    r.add_argument("--resize", type=int, default=None, help="nearest-neighbour resize to NxN first (e.g. 100)")
    r.add_argument("--seed", type=int, default=0, help="accepted for symmetry with check; run is deterministic")

    c = sub.add_parser("check", help="run the randomized property suites")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--scale", type=float, default=1.0, help="multiply every suite's trial count")
    c.add_argument("--suite", action="append", choices=sorted(SUITES), help="run only this suite (repeatable)")
    c.add_argument("--corrupt-restriction", action="store_true", help=argparse.SUPPRESS)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "check":
            return run_checks(args.seed, args.scale, args.suite, args.corrupt_restriction)
        config = RunConfig(
            input=args.input,
            format=args.format,
            threshold=args.threshold,
            windows=args.windows,
            stride=args.stride,
            out=args.out,
            emit=args.emit,
            resize=args.resize,
        )
        start = time.perf_counter()
        status = run(config)
        print(f"wrote {config.out} in {time.perf_counter() - start:.2f}s", file=sys.stderr)
        return status
    except OSError as exc:
        print(f"sheafbranch: io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ParseError as exc:
        print(f"sheafbranch: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValidationError as exc:
        print(f"sheafbranch: validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
