"""Command-line front end.

Subcommands: keygen, encrypt, decrypt, embed, extract, analyze,
chaos {distribution|histogram|cobweb|lyapunov|bifurcation},
demo {ring-shift|spiral-shift}.

Every run writes a JSON manifest next to its primary output; outputs are
written atomically (temp file, then rename).  Exit codes: 0 success, 1 usage,
2 data error, 3 capacity/constraint error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import cipher, imgio, keygen, metrics, permute, stego
from .chaos import HybridMap, Logistic2D, Slmm, case_config, load_config
from .errors import CapacityError, ChaosCryptError, DataError
from .metrics import MetricsReport


def _atomic_write_bytes(path: Path, data: bytes) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _atomic_save_image(buf: imgio.ImageBuffer, path: Path) -> None:
    tmp = path.with_name(f".{path.name}.tmp{path.suffix}")
    try:
        imgio.save(buf, tmp)
        os.replace(tmp, path)
    except BaseException:
        if tmp.exists():
            tmp.unlink()
        raise


def _write_manifest(out_path: Path, command: str, **fields) -> None:
    manifest = {"command": command, **fields}
    data = json.dumps(manifest, indent=2, sort_keys=True).encode() + b"\n"
    _atomic_write_bytes(out_path.with_name(out_path.name + ".manifest.json"), data)


def _write_csv(path: Path, header: list[str], rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    writer.writerows(rows)
    _atomic_write_bytes(path, buf.getvalue().encode())


def _map_from_args(args) -> HybridMap | Logistic2D | Slmm:
    name = getattr(args, "map", "hybrid")
    if name == "logistic2d":
        return Logistic2D()
    if name == "slmm":
        return Slmm(getattr(args, "slmm_beta", 3.0))
    return HybridMap(load_config(args.case))


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def _cmd_keygen(args) -> int:
    image = imgio.load(args.image)
    map2d = HybridMap(load_config(args.case))
    keys = keygen.generate_keys(
        image, args.text.encode(), args.r1, args.r2, args.seed, map2d
    )
    out = Path(args.out)
    _atomic_write_bytes(out, keygen.dumps_keys(keys).encode())
    _write_manifest(
        out,
        "keygen",
        image=str(args.image),
        text=args.text,
        r1=args.r1,
        r2=args.r2,
        seed=args.seed,
        config=args.case,
        outputs=[str(out)],
    )
    print(f"keys written to {out}")
    return 0


def _cmd_encrypt(args) -> int:
    image = imgio.load(args.image)
    keys = keygen.load_keys(args.key)
    map2d = HybridMap(load_config(args.case))
    ct, header = cipher.encrypt(image, keys, map2d)
    out = Path(args.out)
    if out.suffix.lower() == ".cct":
        cipher.save_container(ct, header, out)
    else:
        _atomic_save_image(ct, out)
    _write_manifest(
        out,
        "encrypt",
        image=str(args.image),
        key_file=str(args.key),
        config=args.case,
        kind=header.kind,
        orig_height=header.orig_height,
        orig_width=header.orig_width,
        outputs=[str(out)],
    )
    print(f"ciphertext written to {out}")
    return 0


def _cmd_decrypt(args) -> int:
    keys = keygen.load_keys(args.key)
    map2d = HybridMap(load_config(args.case))
    src = Path(args.image)
    if src.suffix.lower() == ".cct":
        ct, header = cipher.load_container(src)
    else:
        ct = imgio.load(src)
        if args.orig_height is None or args.orig_width is None:
            raise DataError(
                "plain-image ciphertext needs --orig-height/--orig-width (or use a .cct container)"
            )
        header = cipher.CipherHeader(ct.kind, args.orig_height, args.orig_width)
    plain = cipher.decrypt(ct, header, keys, map2d)
    out = Path(args.out)
    _atomic_save_image(plain, out)
    _write_manifest(
        out,
        "decrypt",
        image=str(src),
        key_file=str(args.key),
        config=args.case,
        outputs=[str(out)],
    )
    print(f"decrypted image written to {out}")
    return 0


def _parse_shifts(text: str) -> tuple[int, int]:
    try:
        a, b = (int(t) for t in text.split(","))
    except ValueError:
        raise DataError(f"--shifts wants 'A,B', got {text!r}") from None
    return a, b


def _cmd_embed(args) -> int:
    cover = imgio.load(args.cover)
    secret = imgio.load(args.secret)
    keys = keygen.load_keys(args.key)
    map2d = HybridMap(load_config(args.case))
    shifts = _parse_shifts(args.shifts)
    if cover.kind == "color":
        stego_img, plan = stego.embed(cover, secret, keys, map2d, shifts)
    elif secret.kind == "binary":
        stego_img, plan = stego.embed_binary(cover, secret, keys, map2d, shifts)
    else:
        stego_img, plan = stego.embed_gray(cover, secret, keys, map2d, shifts)
    out = Path(args.out)
    _atomic_save_image(stego_img, out)
    plan_path = Path(args.plan) if args.plan else out.with_suffix(".plan.txt")
    stego.save_plan(plan, plan_path)
    _write_manifest(
        out,
        "embed",
        cover=str(args.cover),
        secret=str(args.secret),
        key_file=str(args.key),
        config=args.case,
        shifts=list(shifts),
        outputs=[str(out), str(plan_path)],
    )
    print(f"stego image written to {out} (plan: {plan_path})")
    return 0


def _cmd_extract(args) -> int:
    stego_img = imgio.load(args.stego)
    keys = keygen.load_keys(args.key)
    map2d = HybridMap(load_config(args.case))
    if args.plan:
        plan = stego.load_plan(args.plan)
    else:
        if args.secret_height is None or args.secret_width is None:
            raise DataError("--plan or --secret-height/--secret-width required")
        scheme = args.scheme or ("color-4msb" if stego_img.kind == "color" else "gray-4msb")
        plan = stego.EmbedPlan(
            scheme,
            (stego_img.height, stego_img.width),
            (args.secret_height, args.secret_width),
            _parse_shifts(args.shifts),
        )
    fp = stego.key_fingerprint(keys)
    if plan.key_fingerprint and plan.key_fingerprint != fp:
        print(f"warning: key fingerprint mismatch (plan {plan.key_fingerprint}, key {fp})", file=sys.stderr)
    if stego_img.kind == "color":
        secret = stego.extract(stego_img, keys, plan, map2d)
    else:
        secret = stego.extract_gray(stego_img, keys, plan, map2d)
    out = Path(args.out)
    _atomic_save_image(secret, out)
    _write_manifest(
        out,
        "extract",
        stego=str(args.stego),
        key_file=str(args.key),
        config=args.case,
        plan=str(args.plan) if args.plan else None,
        outputs=[str(out)],
    )
    print(f"extracted secret written to {out}")
    return 0


def _cmd_analyze(args) -> int:
    a = imgio.load(args.a)
    report = MetricsReport()
    report.entropy = [metrics.entropy(p) for p in a.planes]
    rng = np.random.default_rng(args.seed)
    pairs = args.pairs
    report.correlation = {
        d: [metrics.correlation(p, d, min(pairs, (p.shape[0] - 1) * (p.shape[1] - 1)), rng) for p in a.planes]
        for d in metrics.DIRECTIONS
    }
    report.pairs_sampled = pairs
    if args.b:
        b = imgio.load(args.b)
        report.npcr, report.uaci = metrics.npcr_uaci(a, b)
        report.psnr = metrics.psnr(a, b)
    out = Path(args.report)
    _atomic_write_bytes(out, ("\n".join(report.lines()) + "\n").encode())
    _write_manifest(
        out,
        "analyze",
        a=str(args.a),
        b=str(args.b) if args.b else None,
        pairs=args.pairs,
        seed=args.seed,
        outputs=[str(out)],
    )
    print("\n".join(report.lines()))
    return 0


def _r_grid(args) -> list[float]:
    if args.r_min is not None and args.r_max is not None:
        return list(np.linspace(args.r_min, args.r_max, args.steps))
    if args.r is None:
        raise DataError("either --r or --r-min/--r-max required")
    return [args.r]


def _cmd_chaos(args) -> int:
    map2d = _map_from_args(args)
    out = Path(args.out)
    if args.diagnostic == "distribution":
        rows = metrics.distribution_rows(map2d, args.r, args.n, args.x0, args.y0)
        _write_csv(out, ["i", "x", "y"], rows)
    elif args.diagnostic == "histogram":
        rows = metrics.histogram_rows(map2d, args.r, args.n, args.x0, args.y0, args.bins)
        _write_csv(out, ["bin_left", "bin_right", "count"], rows)
    elif args.diagnostic == "cobweb":
        rows = metrics.cobweb_rows(map2d, args.r, args.n, args.x0, args.y0)
        _write_csv(out, ["x0", "y0", "x1", "y1"], rows)
    elif args.diagnostic == "lyapunov":
        rows = []
        for r in _r_grid(args):
            l1, l2 = metrics.lyapunov(map2d, r, args.n, args.x0, args.y0)
            rows.append((r, l1, l2))
        _write_csv(out, ["r", "lambda1", "lambda2"], rows)
    else:  # bifurcation
        grid = _r_grid(args)
        scan = metrics.bifurcation_scan(map2d, grid, args.transient, args.keep, args.x0, args.y0)
        rows = [(r, x) for r, xs in scan for x in xs]
        _write_csv(out, ["r", "x"], rows)
    _write_manifest(
        out,
        f"chaos {args.diagnostic}",
        config=args.case,
        map=args.map,
        r=args.r,
        r_min=args.r_min,
        r_max=args.r_max,
        n=args.n,
        x0=args.x0,
        y0=args.y0,
        outputs=[str(out)],
    )
    print(f"csv written to {out}")
    return 0


def _cmd_demo(args) -> int:
    image = imgio.load(args.image)
    out = Path(args.out)
    if args.effect == "ring-shift":
        if image.kind == "color":
            r, g, b = imgio.split_planes(image)
            shifted = imgio.merge_planes(*permute.ring_shift_lcr(r, g, b, args.amount))
        else:
            shifted = imgio.ImageBuffer.from_gray(
                permute.ring_shift_gray(image.plane(), args.amount), image.kind
            )
    else:  # spiral-shift
        planes = list(imgio.split_planes(image)) if image.kind == "color" else [image.plane()]
        for kind in args.kind.split("+"):
            planes = list(permute.spiral_shift(planes, kind, args.amount))
        if image.kind == "color":
            shifted = imgio.merge_planes(*planes)
        else:
            shifted = imgio.ImageBuffer.from_gray(planes[0], image.kind)
    _atomic_save_image(shifted, out)
    _write_manifest(
        out,
        f"demo {args.effect}",
        image=str(args.image),
        amount=args.amount,
        kind=getattr(args, "kind", None),
        outputs=[str(out)],
    )
    print(f"demo image written to {out}")
    return 0


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chaoscrypt", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_case(p):
        p.add_argument("--case", default="case3", help="map config: case1/case2/case3 or a file path")

    p = sub.add_parser("keygen", help="derive keys from an image and a text")
    p.add_argument("--image", required=True)
    p.add_argument("--text", required=True)
    p.add_argument("--r1", type=float, required=True)
    p.add_argument("--r2", type=float, required=True)
    p.add_argument("--seed", type=int, required=True, help="nonce seed (runs are replayable)")
    p.add_argument("--out", required=True)
    add_case(p)
    p.set_defaults(func=_cmd_keygen)

    p = sub.add_parser("encrypt", help="encrypt an image")
    p.add_argument("--image", required=True)
    p.add_argument("--key", required=True)
    p.add_argument("--out", required=True, help=".cct container, or an image path (receiver must know dims)")
    add_case(p)
    p.set_defaults(func=_cmd_encrypt)

    p = sub.add_parser("decrypt", help="decrypt a ciphertext")
    p.add_argument("--image", required=True, help=".cct container or ciphertext image")
    p.add_argument("--key", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--orig-height", type=int, help="original height (plain-image ciphertexts)")
    p.add_argument("--orig-width", type=int, help="original width (plain-image ciphertexts)")
    add_case(p)
    p.set_defaults(func=_cmd_decrypt)

    p = sub.add_parser("embed", help="hide a secret image in a cover image")
    p.add_argument("--cover", required=True)
    p.add_argument("--secret", required=True)
    p.add_argument("--key", required=True)
    p.add_argument("--shifts", default="1000,1000", help="spiral shift amounts A,B")
    p.add_argument("--out", required=True)
    p.add_argument("--plan", help="plan file path (default: <out>.plan.txt)")
    add_case(p)
    p.set_defaults(func=_cmd_embed)

    p = sub.add_parser("extract", help="recover a hidden secret image")
    p.add_argument("--stego", required=True)
    p.add_argument("--key", required=True)
    p.add_argument("--plan", help="plan file from embedding")
    p.add_argument("--secret-height", type=int)
    p.add_argument("--secret-width", type=int)
    p.add_argument("--scheme", choices=["color-4msb", "gray-4msb", "binary-lsb"])
    p.add_argument("--shifts", default="1000,1000")
    p.add_argument("--out", required=True)
    add_case(p)
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("analyze", help="security metrics for one image or a pair")
    p.add_argument("--a", required=True)
    p.add_argument("--b")
    p.add_argument("--pairs", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", required=True)
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("chaos", help="export chaos diagnostics as CSV")
    p.add_argument("diagnostic", choices=["distribution", "histogram", "cobweb", "lyapunov", "bifurcation"])
    p.add_argument("--map", choices=["hybrid", "logistic2d", "slmm"], default="hybrid")
    p.add_argument("--slmm-beta", type=float, default=3.0)
    p.add_argument("--r", type=float)
    p.add_argument("--r-min", type=float)
    p.add_argument("--r-max", type=float)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--x0", type=float, default=0.37)
    p.add_argument("--y0", type=float, default=0.62)
    p.add_argument("--bins", type=int, default=100)
    p.add_argument("--transient", type=int, default=200)
    p.add_argument("--keep", type=int, default=50)
    p.add_argument("--out", required=True)
    add_case(p)
    p.set_defaults(func=_cmd_chaos)

    p = sub.add_parser("demo", help="emit intermediate shift visualizations")
    p.add_argument("effect", choices=["ring-shift", "spiral-shift"])
    p.add_argument("--image", required=True)
    p.add_argument("--amount", type=int, default=190)
    p.add_argument("--kind", default="I+II", help="spiral kinds, e.g. I, II, I+II, II+I")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_demo)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ChaosCryptError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
