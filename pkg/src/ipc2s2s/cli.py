"""Command-line front end.

Exit codes: 0 success or true, 1 well-formed but false or rejected,
2 usage error, 3 malformed input.  Results go to stdout (or ``--out``),
diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import contextlib
import io
import json
import sys
from fractions import Fraction
from typing import Callable, TextIO

from . import interval, kripke, proof, regular, s2s, syntax, topology

EXIT_OK, EXIT_FALSE, EXIT_USAGE, EXIT_INPUT = 0, 1, 2, 3


class InputError(Exception):
    """Raised for unreadable or malformed input; maps to exit code 3."""


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(f"{self.prog}: error: {message}")


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ipc2s2s", description="IPC2 proof checking, semantics and S2S compilation")
    p.add_argument("--out", metavar="FILE", help="write the result to FILE instead of stdout")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("parse", help="print the syntax tree of a formula file")
    sp.add_argument("file")

    sp = sub.add_parser("check-proof", help="check a JSON proof tree")
    sp.add_argument("file")
    sp.add_argument("--calculus", choices=[v.value for v in proof.Variant], default="ipc2")

    ev = sub.add_parser("eval", help="evaluate a formula").add_subparsers(
        dest="semantics", required=True, parser_class=_Parser)
    sp = ev.add_parser("kripke", help="forcing in a Kripke frame")
    sp.add_argument("frame")
    sp.add_argument("formula")
    sp.add_argument("--valuation", metavar="FILE")
    sp = ev.add_parser("topo", help="value in the upset topology of a finite poset")
    sp.add_argument("poset")
    sp.add_argument("formula")
    sp.add_argument("--valuation", metavar="FILE")
    sp = ev.add_parser("interval", help="lower and upper bounds over (0,1)")
    sp.add_argument("formula")
    sp.add_argument("--valuation", metavar="FILE")
    sp.add_argument("--pool-depth", type=int, default=2, metavar="K")

    sp = sub.add_parser("translate", help="emit the S2S translation of a formula")
    sp.add_argument("formula")
    sp.add_argument("--rationals", action="store_true", help="restrict to paths naming dyadic rationals")
    sp.add_argument("--wrap", action="store_true", help="emit the closed truth sentence")
    sp.add_argument("--expand-subset", action="store_true", help="spell out subset atoms")

    rg = sub.add_parser("regular", help="regular node sets").add_subparsers(
        dest="action", required=True, parser_class=_Parser)
    sp = rg.add_parser("closed", help="decide the closedness condition for a DFA")
    sp.add_argument("dfa")
    sp = rg.add_parser("encode", help="DFA for a finite union of closed dyadic intervals")
    sp.add_argument("--intervals", required=True, metavar="SPEC")
    sp = rg.add_parser("member", help="is a rational in the closed set named by a DFA")
    sp.add_argument("dfa")
    sp.add_argument("--rational", required=True, metavar="P/Q")
    return p


# -- input helpers ----------------------------------------------------------

def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from None


def _json(path: str):
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON: {e}") from None


def _formula(text: str, where: str = "formula") -> syntax.Formula:
    try:
        return syntax.parse_formula(text)
    except syntax.ParseError as e:
        raise InputError(f"{where}:{e}") from None


def _load(path: str, loader: Callable, errors: tuple):
    try:
        return loader(_json(path))
    except errors as e:
        raise InputError(f"{path}: {e}") from None


# -- commands ---------------------------------------------------------------

def _cmd_parse(a, out) -> int:
    phi = _formula(_read(a.file), a.file)
    out.write(syntax.dump_ast(phi) + "\n")
    return EXIT_OK


def _cmd_check_proof(a, out) -> int:
    tree = _load(a.file, proof.proof_from_json, (proof.ProofFormatError,))
    verdict = proof.check_proof(tree, a.calculus)
    out.write(str(verdict) + "\n")
    return EXIT_OK if verdict else EXIT_FALSE


def _finite_valuation(path: str | None) -> dict:
    if path is None:
        return {}
    data = _json(path)
    if not isinstance(data, dict) or not all(isinstance(v, list) for v in data.values()):
        raise InputError(f"{path}: valuation must map propositions to lists of elements")
    return data


def _cmd_eval(a, out) -> int:
    phi = _formula(a.formula)
    if a.semantics == "kripke":
        frame = _load(a.frame, kripke.frame_from_json, (kripke.FrameError, topology.PosetError))
        try:
            value = kripke.eval_kripke(frame, _finite_valuation(a.valuation), phi)
        except (kripke.ValuationError, topology.UnboundProposition) as e:
            raise InputError(_msg(e)) from None
        out.write("{" + ", ".join(w for w in frame.worlds if w in value) + "}\n")
    elif a.semantics == "topo":
        poset = _load(a.poset, topology.poset_from_json, (topology.PosetError,))
        try:
            value = topology.eval_topo(poset, _finite_valuation(a.valuation), phi)
        except (topology.PosetError, topology.UnboundProposition) as e:
            raise InputError(_msg(e)) from None
        out.write(str(value) + "\n")
    else:
        if a.pool_depth < 1:
            raise _Usage("ipc2s2s eval interval: error: --pool-depth must be at least 1")
        val = {}
        if a.valuation is not None:
            val = _load(a.valuation, interval.valuation_from_json, (interval.IntervalError,))
        try:
            if syntax.is_quantifier_free(phi):
                # exact; desugaring would introduce quantifiers and lose precision
                lower = upper = interval.eval_exact(phi, val)
            else:
                lower, upper = interval.eval_sandwich(syntax.desugar(phi), val,
                                                      interval.QuantifierPool.at_depth(a.pool_depth))
        except (interval.IntervalError, topology.UnboundProposition) as e:
            raise InputError(_msg(e)) from None
        out.write(f"lower: {lower}\nupper: {upper}\n")
    return EXIT_OK


def _cmd_translate(a, out) -> int:
    phi = syntax.desugar(_formula(a.formula))
    star = s2s.translate(phi)
    if a.wrap:
        star = s2s.wrap_truth(star, len(syntax.propositions_in_order(phi)))
    if a.rationals:
        star = s2s.rational_mode(star)
    out.write(s2s.emit(star, expand_subset=a.expand_subset) + "\n")
    return EXIT_OK


def _dfa(path: str) -> regular.DFA:
    return _load(path, regular.DFA.from_json, (regular.DFAError,))


def _cmd_regular(a, out) -> int:
    if a.action == "closed":
        ok = regular.decide_closed(_dfa(a.dfa))
    elif a.action == "encode":
        try:
            comps = regular.parse_intervals(a.intervals)
        except regular.ClosedSetError as e:
            raise InputError(f"--intervals: {e}") from None
        out.write(json.dumps(regular.encode_closed_set(comps).to_json()) + "\n")
        return EXIT_OK
    else:
        S = _dfa(a.dfa)
        try:
            q = Fraction(a.rational)
        except (ValueError, ZeroDivisionError):
            raise InputError(f"--rational: cannot read {a.rational!r} as P/Q") from None
        if not 0 < q < 1:
            raise InputError(f"--rational: {q} is not inside (0,1)")
        ok = regular.member_R(S, q)
    out.write(("true" if ok else "false") + "\n")
    return EXIT_OK if ok else EXIT_FALSE


def _msg(e: BaseException) -> str:
    # KeyError subclasses quote their argument; show the bare text instead
    if isinstance(e, KeyError) and e.args:
        return f"unbound proposition {e.args[0]}"
    return str(e)


_COMMANDS = {"parse": _cmd_parse, "check-proof": _cmd_check_proof, "eval": _cmd_eval,
             "translate": _cmd_translate, "regular": _cmd_regular}


def run(argv: list[str], stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = _build_parser()
    try:
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            args = parser.parse_args(argv)
    except _Usage as e:
        stderr.write(parser.format_usage())
        stderr.write(str(e) + "\n")
        return EXIT_USAGE
    except SystemExit as e:
        # --help exits through here
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    buf = io.StringIO() if args.out else stdout
    try:
        code = _COMMANDS[args.command](args, buf)
    except _Usage as e:
        stderr.write(str(e) + "\n")
        return EXIT_USAGE
    except InputError as e:
        stderr.write(f"error: {e}\n")
        return EXIT_INPUT
    except (s2s.TranslationError, interval.UndersugaredInput) as e:
        stderr.write(f"error: {e}\n")
        return EXIT_INPUT
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(buf.getvalue())
        except OSError as e:
            stderr.write(f"error: {args.out}: {e.strerror}\n")
            return EXIT_INPUT
    return code


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
