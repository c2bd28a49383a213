"""Explicit-state interpreter for the SMV subset written by export.to_smv.

Supports enumerated and boolean VARs, DEFINE, INIT, INVAR, TRANS and a single
INVARSPEC; expressions use ! & | -> <-> = != ``in {..}`` and ``next(x)``.  Only
meant for tiny models: the state space is enumerated outright.
"""
import re
from collections import deque
from itertools import product

_TOKEN = re.compile(r"\s*(<->|->|!=|:=|[()!&|={},;:]|[A-Za-z_][A-Za-z0-9_]*)")


def _tokens(text):
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise SyntaxError(f"bad input at {text[pos:pos + 20]!r}")
        out.append(m.group(1))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, toks):
        self.toks, self.i = toks, 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, want=None):
        tok = self.peek()
        if want is not None and tok != want:
            raise SyntaxError(f"expected {want!r}, got {tok!r}")
        self.i += 1
        return tok

    # precedence, loosest first: <->, ->, |, &, !, comparison
    def expr(self):
        left = self.implies()
        while self.peek() == "<->":
            self.take()
            right = self.implies()
            left = ("iff", left, right)
        return left

    def implies(self):
        left = self.disj()
        if self.peek() == "->":
            self.take()
            return ("imp", left, self.implies())
        return left

    def disj(self):
        left = self.conj()
        while self.peek() == "|":
            self.take()
            left = ("or", left, self.conj())
        return left

    def conj(self):
        left = self.unary()
        while self.peek() == "&":
            self.take()
            left = ("and", left, self.unary())
        return left

    def unary(self):
        if self.peek() == "!":
            self.take()
            return ("not", self.unary())
        return self.comparison()

    def comparison(self):
        left = self.atom()
        op = self.peek()
        if op in ("=", "!="):
            self.take()
            right = self.atom()
            return ("eq" if op == "=" else "ne", left, right)
        if op == "in":
            self.take()
            self.take("{")
            vals = [self.take()]
            while self.peek() == ",":
                self.take()
                vals.append(self.take())
            self.take("}")
            return ("in", left, frozenset(vals))
        return left

    def atom(self):
        tok = self.take()
        if tok == "(":
            e = self.expr()
            self.take(")")
            return e
        if tok == "next":
            self.take("(")
            name = self.take()
            self.take(")")
            return ("next", name)
        if tok in ("TRUE", "FALSE"):
            return ("const", tok == "TRUE")
        return ("id", tok)


class Model:
    def __init__(self, text):
        body = "\n".join(x for x in text.splitlines() if not x.strip().startswith("--"))
        sections = re.split(r"^(MODULE main|VAR|DEFINE|INIT|INVAR|TRANS|INVARSPEC)\b", body, flags=re.M)
        self.vars, self.defines = {}, {}
        self.init = self.invar = self.trans = self.spec = ("const", True)
        for head, content in zip(sections[1::2], sections[2::2]):
            if head == "VAR":
                for name, dom in re.findall(r"(\w+)\s*:\s*([^;]+);", content):
                    dom = dom.strip()
                    self.vars[name] = (False, True) if dom == "boolean" else \
                        tuple(x.strip() for x in dom.strip("{}").split(","))
            elif head == "DEFINE":
                for name, e in re.findall(r"(\w+)\s*:=\s*([^;]+);", content):
                    self.defines[name] = self._parse(e)
            elif head in ("INIT", "INVAR", "TRANS", "INVARSPEC"):
                setattr(self, {"INIT": "init", "INVAR": "invar", "TRANS": "trans", "INVARSPEC": "spec"}[head],
                        self._parse(content))

    @staticmethod
    def _parse(text):
        p = _Parser(_tokens(text))
        e = p.expr()
        if p.peek() is not None:
            raise SyntaxError(f"trailing input {p.toks[p.i:p.i + 5]}")
        return e

    def eval(self, e, cur, nxt=None, memo=None):
        if memo is None:
            memo = {}
        kind = e[0]
        if kind == "const":
            return e[1]
        if kind == "id":
            name = e[1]
            if name in cur:
                return cur[name]
            if name in self.defines:
                if name not in memo:
                    memo[name] = self.eval(self.defines[name], cur, nxt, memo)
                return memo[name]
            return name  # an enumeration value
        if kind == "next":
            return nxt[e[1]]
        if kind == "not":
            return not self.eval(e[1], cur, nxt, memo)
        if kind == "and":
            return self.eval(e[1], cur, nxt, memo) and self.eval(e[2], cur, nxt, memo)
        if kind == "or":
            return self.eval(e[1], cur, nxt, memo) or self.eval(e[2], cur, nxt, memo)
        if kind == "imp":
            return (not self.eval(e[1], cur, nxt, memo)) or self.eval(e[2], cur, nxt, memo)
        if kind == "iff":
            return self.eval(e[1], cur, nxt, memo) == self.eval(e[2], cur, nxt, memo)
        if kind == "eq":
            return self.eval(e[1], cur, nxt, memo) == self.eval(e[2], cur, nxt, memo)
        if kind == "ne":
            return self.eval(e[1], cur, nxt, memo) != self.eval(e[2], cur, nxt, memo)
        if kind == "in":
            return self.eval(e[1], cur, nxt, memo) in e[2]
        raise ValueError(kind)

    def states(self):
        names = list(self.vars)
        for values in product(*(self.vars[n] for n in names)):
            s = dict(zip(names, values))
            if self.eval(self.invar, s):
                yield s

    def shortest_violation(self):
        """Length of the shortest path to a state violating INVARSPEC, or None."""
        states = list(self.states())
        key = lambda s: tuple(s[n] for n in self.vars)
        start = [s for s in states if self.eval(self.init, s)]
        dist = {key(s): 0 for s in start}
        queue = deque(start)
        while queue:
            s = queue.popleft()
            if not self.eval(self.spec, s):
                return dist[key(s)]
            for t in states:
                if key(t) not in dist and self.eval(self.trans, s, t):
                    dist[key(t)] = dist[key(s)] + 1
                    queue.append(t)
        return None
