# Command registrations
from ubmat.commands import bench, estimate, information_tests, ops, schema, simulate

COMMANDS = [ops, estimate, information_tests, simulate, bench, schema]

__all__ = ["COMMANDS"]
