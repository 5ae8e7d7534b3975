"""Command-line entry point for the workbench server."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .codegen import CodeRules
from .server import ConfigError, ServerConfig, run


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="protoforge",
        description=(
            "Self-hosted workbench for exploratory UI prototyping: design-matrix "
            "exploration, project scoping, and stepwise single-file HTML generation "
            "with deterministic record/replay."
        ),
    )
    parser.add_argument("--port", type=int, default=8000, help="port to bind (0 picks one)")
    parser.add_argument(
        "--data-dir", type=Path, default=Path("./data"), help="project storage root"
    )
    parser.add_argument(
        "--provider",
        choices=["live", "record", "replay"],
        default="live",
        help="dispatch mode for model calls",
    )
    parser.add_argument(
        "--fixtures", type=Path, default=None, help="replay fixture file or directory"
    )
    parser.add_argument("--ideation-model", default="gpt-4")
    parser.add_argument("--codegen-model", default="claude-3-5-sonnet")
    parser.add_argument(
        "--self-invoke",
        choices=["proxy", "inject-key"],
        default="proxy",
        help="how generated prototypes reach model APIs at runtime",
    )
    parser.add_argument(
        "--code-rules",
        type=Path,
        default=None,
        help="JSON file overriding line limits / forbidden components / CDN markers",
    )
    return parser


def load_code_rules(path: Path) -> CodeRules:
    overrides = json.loads(path.read_text(encoding="utf-8"))
    defaults = CodeRules()
    return CodeRules(
        max_lines_prompted=overrides.get(
            "max_lines_prompted", defaults.max_lines_prompted
        ),
        max_lines_enforced=overrides.get(
            "max_lines_enforced", defaults.max_lines_enforced
        ),
        forbidden_component_names=tuple(
            overrides.get(
                "forbidden_component_names", defaults.forbidden_component_names
            )
        ),
        required_cdn_markers=tuple(
            overrides.get("required_cdn_markers", defaults.required_cdn_markers)
        ),
    )


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rules = load_code_rules(args.code_rules) if args.code_rules else CodeRules()
        config = ServerConfig(
            port=args.port,
            data_dir=args.data_dir,
            provider_mode=args.provider,
            replay_fixture_path=args.fixtures,
            ideation_model_id=args.ideation_model,
            codegen_model_id=args.codegen_model,
            self_invoke_mode=args.self_invoke,
            code_rules=rules,
        )
        run(config)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"startup failed: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
