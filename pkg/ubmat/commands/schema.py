"""``ubmat schema``: print a shipped JSON schema."""

from ubmat.repo import dump_json, write_or_print
from ubmat.schema import SCHEMAS


def cmd_schema(args) -> int:
    write_or_print(dump_json(SCHEMAS[args.name].model_json_schema()), args.output)
    return 0


def register(subparsers) -> None:
    parser = subparsers.add_parser("schema", help="print the JSON schema of an input or output file")
    parser.add_argument("name", choices=sorted(SCHEMAS), help="schema name")
    parser.add_argument("--output", metavar="PATH", help="write the schema to PATH instead of stdout")
    parser.set_defaults(handler=cmd_schema)
