"""Source spans, diagnostics and the fixed registry of diagnostic codes."""

from __future__ import annotations

from dataclasses import dataclass, field

# code -> short description
CODES: dict[str, str] = {
    # lexing / parsing / elaboration
    "E-LEX": "lexical error",
    "E-PARSE": "syntax error",
    "E-EL-INFER": "cannot infer; add an explicit annotation",
    "E-EL-UNKNOWN-TYPE": "reference to an undeclared trait",
    "E-EL-ARITY": "wrong number of generic arguments",
    # well-formedness
    "E-WF-DUP-DECL": "declaration name declared twice",
    "E-WF-DUP-METH": "method name declared twice in one literal",
    "E-WF-DUP-SIG": "type parameters or parameters of a signature are not disjoint",
    "E-WF-SHADOW": "variable or type variable shadows an enclosing binding",
    "E-WF-CYCLE": "cyclic inheritance",
    "E-WF-SELF-NAME": "top-level self-name must be 'this'",
    "E-WF-FINAL": "a literal declared inside a method body is implemented",
    "E-WF-FUNNEL": "type variables of a body literal are not funnelled",
    "E-WF-ISO-ARG": "iso type used as a generic argument",
    "E-WF-ISO-AFFINE": "iso parameter used more than once outside literals",
    # typing
    "E-TY-OVERRIDE": "incompatible signatures for an inherited method",
    "E-TY-CONFLICT": "unresolved conflicting implementations",
    "E-TY-BODY": "method body does not match the declared return type",
    "E-TY-UNBOUND-VAR": "unbound variable",
    "E-TY-NO-METHOD": "no such method",
    "E-TY-ARG": "argument does not match the parameter type",
    "E-TY-ABSTRACT": "literal leaves a method abstract",
    "E-TY-SUBSUME": "expression type is not a subtype of the expected type",
    "E-TY-CALLABLE": "method not callable on this receiver capability",
    "E-TY-DEAD-METHOD": "literal defines a method it can never call",
    "E-TY-TARGS": "wrong number of type arguments",
    # runtime
    "E-RT-STUCK": "no reduction rule applies",
    "E-RT-FUEL": "step budget exhausted",
    "E-RT-NO-ENTRY": "entry point does not implement Main",
    "E-RT-MAGIC-UNKNOWN": "unhandled magic method",
}


@dataclass(frozen=True, order=True)
class Span:
    line: int = 0
    col: int = 0
    start: int = 0
    end: int = 0

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


NO_SPAN = Span()


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    span: Span = NO_SPAN
    severity: str = "error"
    path: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if self.code not in CODES:
            raise ValueError(f"unregistered diagnostic code {self.code}")

    def render(self, path: str | None = None) -> str:
        where = path if path is not None else (self.path or "<input>")
        return f"{where}:{self.span.line}:{self.span.col}: {self.severity}[{self.code}]: {self.message}"

    def to_json(self, path: str | None = None) -> dict:
        return {
            "path": path if path is not None else self.path,
            "line": self.span.line,
            "col": self.span.col,
            "severity": self.severity,
            "code": self.code,
            "message": self.message,
        }


def sort_diagnostics(diags: list[Diagnostic]) -> list[Diagnostic]:
    """Order by span then code, dropping exact duplicates."""
    seen = set()
    out = []
    for d in sorted(diags, key=lambda d: (d.span, d.code, d.message)):
        key = (d.span, d.code, d.message)
        if key not in seen:
            seen.add(key)
            out.append(d)
    return out


class FearlessError(Exception):
    """Raised by a stage that cannot continue; carries its diagnostics."""

    def __init__(self, diagnostics: list[Diagnostic] | Diagnostic):
        if isinstance(diagnostics, Diagnostic):
            diagnostics = [diagnostics]
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(d.render() for d in self.diagnostics))

    @property
    def code(self) -> str:
        return self.diagnostics[0].code
