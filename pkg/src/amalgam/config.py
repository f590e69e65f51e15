"""Flat ``key=value`` configuration with ``block { ... }`` nesting.

Example::

    grid { dim=1 L=4 N=1024 }
    space {
        p=2, q=inf, t=0.5
        w=power:0.3 v=1
    }
    f=indicator:0,1

Keys inside a block are stored as ``block.key``. Pairs are separated by
whitespace; a trailing comma after a value is a separator too (so commas
inside specs like ``indicator:0,1`` survive). ``#`` starts a comment.
"""
from __future__ import annotations

import re


class ConfigError(ValueError):
    """Malformed configuration text; the message carries the line number."""


_TOKEN = re.compile(r"\{|\}|[^\s{}]+")


def parse_config(text: str, source: str = "<config>") -> dict:
    out = {}
    stack = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        tokens = _TOKEN.findall(line)
        k = 0
        while k < len(tokens):
            tok = tokens[k]
            if tok == "}":
                if not stack:
                    raise ConfigError(f"{source}:{lineno}: unmatched '}}'")
                stack.pop()
            elif k + 1 < len(tokens) and tokens[k + 1] == "{":
                if "=" in tok:
                    raise ConfigError(f"{source}:{lineno}: block name {tok!r} contains '='")
                stack.append(tok)
                k += 1
            elif tok == "{":
                raise ConfigError(f"{source}:{lineno}: '{{' without a block name")
            else:
                key, sep, value = tok.rstrip(",").partition("=")
                if not sep or not key or not value:
                    raise ConfigError(f"{source}:{lineno}: expected key=value, got {tok!r}")
                out[".".join(stack + [key])] = value
            k += 1
    if stack:
        raise ConfigError(f"{source}: unclosed block {stack[-1]!r}")
    return out


def parse_pairs(items, source="<command line>") -> dict:
    """``key=value`` tokens from the command line; ``a.b=c`` addresses a block key."""
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key or not value:
            raise ConfigError(f"{source}: expected key=value, got {item!r}")
        out[key] = value
    return out


def parse_grid_flag(text: str) -> dict:
    """``dim=1,L=4,N=1024`` -> ``{"grid.dim": "1", ...}``."""
    out = {}
    for part in filter(None, text.split(",")):
        key, sep, value = part.partition("=")
        if not sep or key not in ("dim", "L", "N"):
            raise ConfigError(f"--grid: expected dim=..,L=..,N=.., got {part!r}")
        out["grid." + key] = value
    return out
