import argparse
import json
import os
import sys
from typing import Any, Dict, List, Optional

from app.domin.om.controller.om_controller import OmController
from app.domin.om.models.exceptions import NoPeelingFound, OmError, UsageError
from app.domin.om.service.om_service import OmService
from app.foundation.infra.logger import get_logger

logger = get_logger(__name__)

_INPUT_COMMANDS = ("classify", "topes", "cocircuits", "rank", "vc", "corner", "peel", "scheme-build")


class _Parser(argparse.ArgumentParser):
    # argparse 기본 동작(exit 2) 대신 사용 오류로 올립니다
    def error(self, message: str):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="om", description="Oriented-matroid compression schemes and OM programming.")
    parser.add_argument("--max-universe", type=int, default=None, help="열거 상한 |U| (OM_MAX_UNIVERSE 대체)")
    parser.add_argument("--json", action="store_true", help="보고서를 JSON으로 출력")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    for name in _INPUT_COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--class", dest="class_path", required=True, help=".sv 또는 행렬 파일")
        if name not in ("corner", "peel"):
            p.add_argument("--g", default=None, help="아핀 OM의 구분 원소")
        p.add_argument("--out", default=None, help="출력 파일")
        if name == "scheme-build":
            p.add_argument("--trace", default=None, help="빌드 기록 파일")

    p = sub.add_parser("program-solve")
    p.add_argument("--class", dest="class_path", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--f", required=True)
    p.add_argument("--constraints", default="", help="e=+,f=- 형식")
    p.add_argument("--out", default=None)

    p = sub.add_parser("scheme-verify")
    p.add_argument("--class", dest="class_path", required=True)
    p.add_argument("--scheme", required=True)
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--g", default=None)
    p.add_argument("--out", default=None)

    p = sub.add_parser("gen")
    p.add_argument("keys", nargs="*", help="인스턴스 키. 없으면 기본 목록 전체")
    p.add_argument("--out", required=True, help="출력 디렉터리")
    p.add_argument("--matrix", action="store_true", help="행렬 텍스트(.mat)도 저장")
    return parser


def _read(path: str) -> str:
    if not os.path.isfile(path):
        raise UsageError(f"no such file: {path}")
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(path: Optional[str], text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    logger.info(f"출력 저장: {path}")


def _render(command: str, data: Dict[str, Any]) -> str:
    """사람이 읽는 텍스트 출력"""
    if command == "classify":
        lines = [f"verdict={data['verdict']}", f"simple={str(data['is_simple']).lower()}"]
        lines += [f"{axiom}={str(data['satisfies_' + axiom]).lower()}" for axiom in ("C", "SE", "Sym", "FS")]
        lines += [f"witness={w}" for w in data["witnesses"]]
    elif command in ("topes", "cocircuits"):
        lines = list(data[command])
    elif command == "rank":
        lines = [str(data["rank"])]
        if data["affine_rank"] is not None:
            lines.append(f"affine={data['affine_rank']}")
    elif command == "vc":
        lines = [str(data["vc"]), "largest={" + ",".join(data["largest"]) + "}"]
    elif command == "program-solve":
        lines = [data["solution"]]
    elif command == "corner":
        lines = [f"localization={data['localization']}", f"side={data['side']}",
                 f"size={len(data['corner'])}"] + [f"D {t}" for t in data["corner"]]
    elif command == "peel":
        lines = [f"step {i} cell={s['cell']} " + ",".join(s["corner"]) for i, s in enumerate(data["steps"], 1)]
    elif command == "scheme-verify":
        lines = ["PASS" if data["passed"] else "FAIL",
                 f"samples={data['samples_checked']}", f"beta={data['beta_entries']}",
                 f"max_image={data['max_image_size']}"] + list(data["violations"])
    else:
        return json.dumps(data, sort_keys=True, indent=2) + "\n"
    return "\n".join(lines) + "\n"


def run(args: argparse.Namespace) -> int:
    controller = OmController(max_universe=args.max_universe, raise_http=False)
    command = args.command
    if command is None:
        raise UsageError("a subcommand is required")

    if command == "gen":
        keys = args.keys or OmService.instance_keys()
        os.makedirs(args.out, exist_ok=True)
        texts = controller.instances(keys, args.matrix)["data"]
        for key, files in texts.items():
            stem = os.path.join(args.out, OmService.instance_filename(key))
            _write(stem + ".sv", files["sv"])
            if "matrix" in files:
                _write(stem + ".mat", files["matrix"])
        return 0

    text = _read(args.class_path)
    if command == "scheme-build":
        data = controller.build_scheme(text, "auto", args.g)["data"]
        _write(args.out, data["document"])
        if args.trace:
            _write(args.trace, "".join(line + "\n" for line in data["trace"]))
        return 0
    if command == "scheme-verify":
        data = controller.verify_scheme(text, _read(args.scheme), args.size, args.g)["data"]
        _write(args.out, json.dumps(data, sort_keys=True, indent=2) + "\n" if args.json else _render(command, data))
        return 0 if data["passed"] else 3
    if command == "program-solve":
        constraints = OmService.parse_constraints(args.constraints)
        data = controller.solve_program(text, args.g, args.f, constraints)["data"]
    elif command in ("corner", "peel"):
        data = getattr(controller, command)(text)["data"]
    else:
        data = getattr(controller, command)(text, "auto", args.g)["data"]
    _write(args.out, json.dumps(data, sort_keys=True, indent=2) + "\n" if args.json else _render(command, data))
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    try:
        return run(build_parser().parse_args(argv))
    except NoPeelingFound as e:
        sys.stdout.write("NO_PEELING\n")
        sys.stderr.write(f"{e}\n")
        return e.exit_code
    except OmError as e:
        sys.stderr.write(f"{type(e).__name__}: {e}\n")
        return e.exit_code
    except Exception as e:
        logger.error(f"예상하지 못한 오류: {e}")
        sys.stderr.write(f"error: {e}\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
