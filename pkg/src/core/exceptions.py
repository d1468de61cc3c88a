"""
Custom Exceptions - Tydliga exceptions för bättre felhantering.
"""

from typing import Optional, Any


class SemiHilbertError(Exception):
    """Base exception för verktygslådan."""

    def __init__(self, message: str, user_message: Optional[str] = None):
        super().__init__(message)
        self.user_message = user_message or message
        self.message = message


class InvalidMeasureError(SemiHilbertError):
    """Exception för ogiltiga mått (atomvikter)."""

    def __init__(
        self,
        message: str,
        atom: Optional[int] = None,
        weight: Optional[float] = None,
        user_message: Optional[str] = None
    ):
        super().__init__(message, user_message)
        self.atom = atom
        self.weight = weight

        if not user_message:
            self.user_message = "Ogiltigt mått: alla atomvikter måste vara strikt positiva."
            if atom is not None:
                self.user_message += f" (atom {atom} har vikt {weight})"


class DimensionMismatchError(SemiHilbertError):
    """Exception när dimensioner eller rum inte stämmer överens."""

    def __init__(
        self,
        message: str,
        expected: Optional[Any] = None,
        actual: Optional[Any] = None,
        user_message: Optional[str] = None
    ):
        super().__init__(message, user_message)
        self.expected = expected
        self.actual = actual

        if not user_message:
            self.user_message = f"Dimensionsfel: förväntade {expected}, fick {actual}."


class InvalidWeightError(SemiHilbertError):
    """Exception för vikter u som inte är reella och icke-negativa."""

    def __init__(
        self,
        message: str,
        atom: Optional[int] = None,
        value: Optional[complex] = None,
        user_message: Optional[str] = None
    ):
        super().__init__(message, user_message)
        self.atom = atom
        self.value = value

        if not user_message:
            self.user_message = (
                "Vikten u måste vara reell och icke-negativ (M_u positiv)."
            )
            if atom is not None:
                self.user_message += f" Atom {atom} har värdet {value}."


class NotSelfAdjointError(SemiHilbertError):
    """Exception när en operator inte är μ-självadjungerad."""

    def __init__(
        self,
        message: str,
        asymmetry: Optional[float] = None,
        user_message: Optional[str] = None
    ):
        super().__init__(message, user_message)
        self.asymmetry = asymmetry

        if not user_message:
            self.user_message = (
                f"Operatorn är inte självadjungerad i μ-metriken "
                f"(relativ asymmetri {asymmetry:.3e})." if asymmetry is not None
                else "Operatorn är inte självadjungerad i μ-metriken."
            )


class NotPositiveError(SemiHilbertError):
    """Exception när en operator förväntas vara positiv men inte är det."""

    def __init__(
        self,
        message: str,
        eigenvalue: Optional[float] = None,
        asymmetry: Optional[float] = None,
        user_message: Optional[str] = None
    ):
        super().__init__(message, user_message)
        self.eigenvalue = eigenvalue
        self.asymmetry = asymmetry

        if not user_message:
            if eigenvalue is not None:
                self.user_message = f"Operatorn är inte positiv: egenvärde {eigenvalue:.6g}."
            elif asymmetry is not None:
                self.user_message = (
                    f"Operatorn är inte positiv: den är inte självadjungerad "
                    f"(relativ asymmetri {asymmetry:.3e})."
                )
            else:
                self.user_message = "Operatorn är inte positiv."


class NotInAdjointAlgebraError(SemiHilbertError):
    """Exception när T saknar A-adjungerad (T ∉ B_A(H))."""

    def __init__(
        self,
        message: str,
        rank_a: Optional[int] = None,
        rank_augmented: Optional[int] = None,
        user_message: Optional[str] = None
    ):
        super().__init__(message, user_message)
        self.rank_a = rank_a
        self.rank_augmented = rank_augmented

        if not user_message:
            self.user_message = (
                "Operatorn saknar A-adjungerad: R(T*A) ligger inte i R(A) "
                f"(rang {rank_augmented} mot {rank_a})."
            )


class RangeInclusionError(SemiHilbertError):
    """Exception när R(B) ⊄ R(A) i Douglas faktorisering."""

    def __init__(
        self,
        message: str,
        report: Optional[Any] = None,
        user_message: Optional[str] = None
    ):
        super().__init__(message, user_message)
        self.report = report

        if not user_message:
            self.user_message = (
                "Ekvationen AX = B saknar lösning: R(B) ligger inte i R(A).\n\n"
                "Se Douglas-rapporten för detaljer."
            )


class LinearDependenceError(SemiHilbertError):
    """Exception för linjärt beroende basvektorer i ett delrum."""

    def __init__(
        self,
        message: str,
        rank: Optional[int] = None,
        size: Optional[int] = None,
        user_message: Optional[str] = None
    ):
        super().__init__(message, user_message)
        self.rank = rank
        self.size = size

        if not user_message:
            self.user_message = f"Basen är linjärt beroende (rang {rank} av {size})."


class ScenarioError(SemiHilbertError):
    """Exception för fel i scenariofiler och CLI-specifikationer."""

    def __init__(
        self,
        message: str,
        field: Optional[str] = None,
        user_message: Optional[str] = None
    ):
        super().__init__(message, user_message)
        self.field = field

        if not user_message:
            self.user_message = f"Fel i fältet '{field or 'okänt'}': {message}"


class SearchLimitError(SemiHilbertError):
    """Exception när en uttömmande sökning blir för stor."""

    def __init__(
        self,
        n: int,
        limit: int,
        user_message: Optional[str] = None
    ):
        message = f"n={n} överskrider gränsen {limit} för uttömmande sökning"
        super().__init__(message, user_message)
        self.n = n
        self.limit = limit

        if not user_message:
            self.user_message = (
                f"För många atomer för uttömmande sökning (n={n}, max {limit}).\n\n"
                f"Antalet avbildningar växer som n^n; använd n ≤ {limit} "
                "eller slumpade körningar via 'douglas'/testsviterna."
            )
