"""Command-line entry point: ``morava <command> --p P --n N --group ...``."""

from __future__ import annotations

import argparse
import ast
import json
import os
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

from . import commands
from .abelian import DEFAULT_CAP, CapExceeded
from .coefficients import PrimeContext
from .reproduce import DEFAULT_HEIGHTS, DEFAULT_PRIMES, Item, items, run_item
from .serialize import dumps, render_text
from .sweep import thread_count

EXIT_OK, EXIT_FAILED, EXIT_INVALID, EXIT_CAP = 0, 1, 2, 3

COMMANDS = (
    "ring",
    "fgl",
    "transfer-unit",
    "pairing",
    "fundamental-class",
    "cap-table",
    "verify-transverse",
    "reproduce-paper",
)


class InvalidInput(ValueError):
    pass


@dataclass(frozen=True)
class ComputationRequest:
    command: str
    p: int | None = None
    n: int | None = None
    group: tuple[int, ...] | None = None
    subgroup_h: tuple[tuple[int, ...], ...] | None = None
    subgroup_k: tuple[tuple[int, ...], ...] | None = None
    format: str = "text"
    cap: int = DEFAULT_CAP
    truncation: int | None = None
    out: str | None = None

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise InvalidInput(f"unknown command {self.command!r}")
        if self.command != "reproduce-paper":
            if self.p is None or self.n is None:
                raise InvalidInput(f"{self.command} needs --p and --n")
        if self.p is not None or self.n is not None:
            try:
                PrimeContext(self.p if self.p is not None else 2, self.n if self.n is not None else 1)
            except (ValueError, TypeError) as exc:
                raise InvalidInput(str(exc)) from exc
        if self.command not in ("fgl", "reproduce-paper") and self.group is None:
            raise InvalidInput(f"{self.command} needs --group (use --group '' for the trivial group)")
        if self.group is not None and any(k < 1 for k in self.group):
            raise InvalidInput("group exponents must be positive")
        for gens in (self.subgroup_h, self.subgroup_k):
            for g in gens or ():
                if len(g) != len(self.group or ()):
                    raise InvalidInput(f"generator {g} does not match the group rank {len(self.group or ())}")
        if self.cap < 1:
            raise InvalidInput("--cap must be positive")

    def echo(self) -> dict:
        out = {"command": self.command, "p": self.p, "n": self.n}
        if self.group is not None:
            out["group"] = list(self.group)
        if self.subgroup_h is not None:
            out["subgroupH"] = [list(g) for g in self.subgroup_h]
        if self.subgroup_k is not None:
            out["subgroupK"] = [list(g) for g in self.subgroup_k]
        if self.truncation is not None:
            out["truncation"] = self.truncation
        if self.command == "verify-transverse":
            out["cap"] = self.cap
        return out


def parse_group(text: str) -> tuple[int, ...]:
    text = text.strip().strip("[]()")
    if not text:
        return ()
    try:
        return tuple(int(t) for t in re.split(r"[,\s]+", text) if t)
    except ValueError as exc:
        raise InvalidInput(f"malformed group exponents {text!r}") from exc


def parse_generators(text: str) -> tuple[tuple[int, ...], ...]:
    """Accepts '(1,0);(0,1)', '[(1,0),(0,1)]', '1,0;0,1' or a single '2'."""
    text = text.strip()
    try:
        groups = re.findall(r"[\(\[]([^\(\)\[\]]*)[\)\]]", text)
        if not groups:
            groups = [g for g in text.split(";") if g.strip()]
        gens = []
        for g in groups:
            val = ast.literal_eval("(" + g + ",)") if g.strip() else ()
            if not all(isinstance(v, int) for v in val):
                raise ValueError
            gens.append(tuple(val))
        return tuple(gens)
    except (ValueError, SyntaxError) as exc:
        raise InvalidInput(f"malformed generators {text!r}") from exc


def run(request: ComputationRequest) -> dict:
    """Dispatch a single-case request and wrap the outcome as a report."""
    request.validate()
    ctx = PrimeContext(request.p, request.n)
    start = time.perf_counter()
    exps = request.group
    if request.command == "ring":
        res = commands.ring(ctx, exps)
    elif request.command == "fgl":
        res = commands.fgl(ctx, request.truncation)
    elif request.command == "transfer-unit":
        res = commands.transfer_unit(ctx, exps)
    elif request.command == "pairing":
        res = commands.pairing(ctx, exps)
    elif request.command == "fundamental-class":
        res = commands.fundamental_class_report(ctx, exps)
    elif request.command == "cap-table":
        res = commands.cap_table(ctx, exps)
    elif request.command == "verify-transverse":
        res = commands.verify_transverse(ctx, exps, request.subgroup_h, request.subgroup_k, request.cap)
    else:
        raise InvalidInput(f"{request.command} is not a single-case command")
    notes = ["uses the transfer unit <p^k>(x1 -F x2) for k >= 2"] if res["higher"] else []
    return {
        "schemaVersion": 1,
        "request": request.echo(),
        "payload": res["payload"],
        "checks": res["checks"],
        "provenance": {"usesHigherTransferUnit": res["higher"], "notes": notes},
        "timing": {"seconds": round(time.perf_counter() - start, 6)},
    }


def failed(report: dict) -> bool:
    return any(c["status"] == "FAIL" for c in report["checks"])


def reproduce_paper(
    out: str | Path, primes=DEFAULT_PRIMES, heights=DEFAULT_HEIGHTS, fmt: str = "json", threads: int | None = None
) -> list[tuple[Item, dict]]:
    """Write one golden file per item plus SUMMARY.txt; results are ordered by item key."""
    todo = items(primes, heights)
    threads = thread_count() if threads is None else threads
    if threads > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(run_item, todo))
    else:
        reports = [run_item(it) for it in todo]
    results = sorted(zip(todo, reports), key=lambda r: r[0].key)
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    summary = []
    for it, rep in results:
        ext = "json" if fmt == "json" else "txt"
        text = dumps(rep) if fmt == "json" else render_text(rep)
        (out / f"{it.key}.{ext}").write_text(text)
        summary.append(f"{'FAIL' if failed(rep) else 'PASS'} {it.key}")
    (out / "SUMMARY.txt").write_text("\n".join(summary) + "\n")
    return results


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="morava", description="Morava K-theory of classifying spaces of finite abelian p-groups.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--p", type=int, help="the prime")
    ap.add_argument("--n", type=int, help="the height")
    ap.add_argument("--group", help="exponents k_i of G = prod Z/p^k_i, e.g. '1,2'")
    ap.add_argument("--subgroup-h", help="generators of H, e.g. '(1,0);(0,2)'")
    ap.add_argument("--subgroup-k", help="generators of K")
    ap.add_argument("--format", choices=("text", "json"), default="text")
    ap.add_argument("--cap", type=int, default=DEFAULT_CAP, help="largest group order to enumerate")
    ap.add_argument("--truncation", type=int, help="fgl: keep x^i y^j with i, j below this")
    ap.add_argument("--out", help="output file, or directory for reproduce-paper")
    ap.add_argument("--timing", action="store_true", help="include wall-clock time in the report")
    return ap


def _request(args) -> ComputationRequest:
    return ComputationRequest(
        command=args.command,
        p=args.p,
        n=args.n,
        group=parse_group(args.group) if args.group is not None else None,
        subgroup_h=parse_generators(args.subgroup_h) if args.subgroup_h is not None else None,
        subgroup_k=parse_generators(args.subgroup_k) if args.subgroup_k is not None else None,
        format=args.format,
        cap=args.cap,
        truncation=args.truncation,
        out=args.out,
    )


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        req = _request(args)
        req.validate()
        if req.command == "reproduce-paper":
            primes = (req.p,) if req.p is not None else DEFAULT_PRIMES
            heights = (req.n,) if req.n is not None else DEFAULT_HEIGHTS
            results = reproduce_paper(req.out or "golden", primes, heights, req.format)
            for it, rep in results:
                print(f"{'FAIL' if failed(rep) else 'PASS'} {it.key}")
            return EXIT_FAILED if any(failed(rep) for _, rep in results) else EXIT_OK
        report = run(req)
    except CapExceeded as exc:
        print(f"morava: resource cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ValueError, TypeError) as exc:
        print(f"morava: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if not args.timing:
        report.pop("timing")
    text = dumps(report) if req.format == "json" else render_text(report)
    if req.out:
        Path(req.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_FAILED if failed(report) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
