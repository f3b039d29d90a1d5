"""Hypersubstitutions and finitely enumerable monoids of them.

A hypersubstitution assigns to every operation symbol of a signature an
image term of the same arity (over variables x0..x_{arity-1}); variables
are always fixed.  It acts on arbitrary terms inductively: the image of an
application is the image term of its head with the recursively mapped
arguments substituted for x0, x1, ...

Monoids of hypersubstitutions are described by a finite recipe and
enumerated in a canonical order.  Infinite monoids (all hypersubstitutions,
or all zero/meet-preserving ones) are represented by depth-bounded slices;
results quantified over such a monoid are only exhaustive up to the stated
image depth.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping

from .terms import (
    App,
    Equation,
    QuasiEquation,
    Signature,
    Term,
    TermError,
    Var,
    iter_terms,
    subst_vars,
    term_depth,
    term_key,
    variables,
)


class MonoidError(ValueError):
    """Raised for invalid monoid descriptions or failed enumerations."""


@dataclass(frozen=True)
class HyperSub:
    """Total map from operation symbols to image terms of matching arity."""

    images: tuple[tuple[str, Term], ...]

    @classmethod
    def of(cls, sig: Signature, images: Mapping[str, Term]) -> "HyperSub":
        """Validate and canonicalise (signature order) an image assignment."""
        out = []
        for op, arity in sig.ops:
            if op not in images:
                raise TermError(f"no image for operation symbol {op!r}")
            img = images[op]
            sig.validate(img)
            if any(v >= arity for v in variables(img)):
                raise TermError(
                    f"image of {op!r} uses variables beyond its arity {arity}"
                )
            out.append((op, img))
        if len(images) != len(sig.ops):
            extra = set(images) - set(sig.op_names)
            raise TermError(f"images given for unknown symbols {sorted(extra)}")
        return cls(tuple(out))

    @classmethod
    def identity(cls, sig: Signature) -> "HyperSub":
        return cls(
            tuple(
                (op, App(op, tuple(Var(i) for i in range(n))))
                for op, n in sig.ops
            )
        )

    def image(self, op: str) -> Term:
        for o, t in self.images:
            if o == op:
                return t
        raise TermError(f"no image for operation symbol {op!r}")

    def apply(self, term: Term) -> Term:
        """Inductive action on terms; variables are fixed."""
        if isinstance(term, Var):
            return term
        mapped = {i: self.apply(a) for i, a in enumerate(term.args)}
        return subst_vars(self.image(term.op), mapped)

    def apply_equation(self, eq: Equation) -> Equation:
        return eq.map_terms(self.apply)

    def apply_quasi(self, q: QuasiEquation) -> QuasiEquation:
        return q.map_terms(self.apply)

    def compose(self, other: "HyperSub") -> "HyperSub":
        """`self` after `other`: result.apply(t) == self.apply(other.apply(t))."""
        return HyperSub(
            tuple((op, self.apply(img)) for op, img in other.images)
        )

    def is_identity(self) -> bool:
        return all(
            img == App(op, tuple(Var(i) for i in range(len(img.args))))
            if isinstance(img, App)
            else False
            for op, img in self.images
        )

    def is_fundamental(self) -> bool:
        """True iff every image is one symbol applied to variables only."""
        return all(
            isinstance(img, App)
            and all(isinstance(a, Var) for a in img.args)
            for _, img in self.images
        )

    def is_symbol_renaming(self) -> bool:
        """True iff every image is a symbol over a permutation of x0..x_{n-1}."""
        for _, img in self.images:
            if not isinstance(img, App):
                return False
            idxs = [a.index for a in img.args if isinstance(a, Var)]
            if len(idxs) != len(img.args):
                return False
            if sorted(idxs) != list(range(len(img.args))):
                return False
        return True

    def max_image_depth(self) -> int:
        return max(term_depth(img) for _, img in self.images)

    def sort_key(self):
        return tuple(term_key(img) for _, img in self.images)


@dataclass(frozen=True)
class Monoid:
    """A finitely enumerable submonoid (or bounded slice) of hypersubstitutions.

    kind is one of:
      explicit   -- members given outright; must contain the identity and be
                    closed under composition (checked on construction)
      generated  -- closure of the generators, aborting past `cap` elements
      trivial    -- just the identity
      fundamental-- every sigma whose images are all non-variable fundamental
                    terms (one symbol over variables, repetition allowed)
      depth_slice-- every sigma with image depth <= `image_depth`; a bounded
                    slice of the monoid of all hypersubstitutions
      zero_meet  -- sigma fixing the zero constant and the meet operation,
                    all other images non-variable terms of depth <=
                    `image_depth` in which every variable of the arity
                    occurs (dropping a variable would let a derived
                    operation ignore an argument, so zero plugged there
                    would no longer absorb)
      zero_meet_fundamental -- sigma fixing zero and meet whose other images
                    rename the head symbol over a permutation of variables
    """

    sig: Signature
    kind: str
    members: tuple[HyperSub, ...] = ()
    image_depth: int | None = None
    cap: int | None = None
    zero: str | None = None
    meet: str | None = None
    name: str = field(default="", compare=False)

    @classmethod
    def explicit(cls, sig: Signature, sigmas: Iterable[HyperSub], name: str = "") -> "Monoid":
        elems = tuple(sorted(set(sigmas), key=HyperSub.sort_key))
        ident = HyperSub.identity(sig)
        if ident not in elems:
            raise MonoidError("explicit monoid must contain the identity")
        for a in elems:
            for b in elems:
                if a.compose(b) not in elems:
                    raise MonoidError(
                        "explicit monoid is not closed under composition"
                    )
        return cls(sig, "explicit", members=elems, name=name)

    @classmethod
    def generated(cls, sig: Signature, generators: Iterable[HyperSub], cap: int = 64, name: str = "") -> "Monoid":
        return cls(sig, "generated", members=tuple(generators), cap=cap, name=name)

    @classmethod
    def trivial(cls, sig: Signature, name: str = "") -> "Monoid":
        return cls(sig, "trivial", name=name)

    @classmethod
    def fundamental(cls, sig: Signature, name: str = "") -> "Monoid":
        return cls(sig, "fundamental", name=name)

    @classmethod
    def depth_slice(cls, sig: Signature, image_depth: int, name: str = "") -> "Monoid":
        return cls(sig, "depth_slice", image_depth=image_depth, name=name)

    @classmethod
    def zero_meet(cls, sig: Signature, image_depth: int, zero: str, meet: str, name: str = "") -> "Monoid":
        cls._check_zero_meet(sig, zero, meet)
        return cls(sig, "zero_meet", image_depth=image_depth, zero=zero, meet=meet, name=name)

    @classmethod
    def zero_meet_fundamental(cls, sig: Signature, zero: str, meet: str, name: str = "") -> "Monoid":
        cls._check_zero_meet(sig, zero, meet)
        return cls(sig, "zero_meet_fundamental", zero=zero, meet=meet, name=name)

    @staticmethod
    def _check_zero_meet(sig: Signature, zero: str, meet: str) -> None:
        if not sig.has(zero) or sig.arity(zero) != 0:
            raise MonoidError(f"signature has no constant {zero!r}")
        if not sig.has(meet) or sig.arity(meet) != 2:
            raise MonoidError(f"signature has no binary operation {meet!r}")

    def elements(self) -> tuple[HyperSub, ...]:
        """Canonically ordered members (sorted by the image term order)."""
        return _elements(self)

    def contains(self, sigma: HyperSub) -> bool:
        return sigma in _element_set(self)

    @property
    def is_exhaustive(self) -> bool:
        """False for depth-bounded slices of infinite monoids."""
        return self.kind not in ("depth_slice", "zero_meet")

    def coverage_note(self) -> str:
        n = len(self.elements())
        if self.is_exhaustive:
            return f"exhaustive over {n} element(s)"
        return f"verified up to image depth {self.image_depth} ({n} element(s))"


@lru_cache(maxsize=None)
def _elements(m: Monoid) -> tuple[HyperSub, ...]:
    sig = m.sig
    ident = HyperSub.identity(sig)
    if m.kind == "trivial":
        return (ident,)
    if m.kind == "explicit":
        return m.members  # validated and sorted at construction
    if m.kind == "generated":
        cap = m.cap if m.cap is not None else 64
        closure = {ident}
        frontier = [ident, *m.members]
        for g in m.members:
            closure.add(g)
        while frontier:
            nxt = []
            for a in frontier:
                for b in list(closure):
                    for c in (a.compose(b), b.compose(a)):
                        if c not in closure:
                            closure.add(c)
                            nxt.append(c)
                            if len(closure) > cap:
                                raise MonoidError(
                                    f"generated closure exceeds cap {cap}"
                                )
            frontier = nxt
        return tuple(sorted(closure, key=HyperSub.sort_key))
    if m.kind == "fundamental":
        choices = []
        for op, n in sig.ops:
            imgs = [
                App(g, tuple(Var(i) for i in tup))
                for g, gn in sig.ops
                if gn == n
                for tup in itertools.product(range(n), repeat=n)
            ]
            if not imgs:
                raise MonoidError(f"no fundamental image available for {op!r}")
            choices.append([(op, t) for t in imgs])
        elems = [HyperSub(tuple(c)) for c in itertools.product(*choices)]
        return tuple(sorted(set(elems), key=HyperSub.sort_key))
    if m.kind == "depth_slice":
        choices = []
        for op, n in sig.ops:
            imgs = iter_terms(sig, n, m.image_depth or 0)
            choices.append([(op, t) for t in imgs])
        elems = [HyperSub(tuple(c)) for c in itertools.product(*choices)]
        return tuple(sorted(set(elems), key=HyperSub.sort_key))
    if m.kind in ("zero_meet", "zero_meet_fundamental"):
        fixed = {
            m.zero: App(m.zero),
            m.meet: App(m.meet, (Var(0), Var(1))),
        }
        choices = []
        for op, n in sig.ops:
            if op in fixed:
                choices.append([(op, fixed[op])])
                continue
            if m.kind == "zero_meet":
                needed = set(range(n))
                imgs = [
                    t
                    for t in iter_terms(sig, n, m.image_depth or 0)
                    if not isinstance(t, Var) and variables(t) >= needed
                ]
            else:
                imgs = [
                    App(g, tuple(Var(i) for i in perm))
                    for g, gn in sig.ops
                    if gn == n
                    for perm in itertools.permutations(range(n))
                ]
            if not imgs:
                raise MonoidError(f"no admissible image for {op!r}")
            choices.append([(op, t) for t in imgs])
        elems = [HyperSub(tuple(c)) for c in itertools.product(*choices)]
        return tuple(sorted(set(elems), key=HyperSub.sort_key))
    raise MonoidError(f"unknown monoid kind {m.kind!r}")


@lru_cache(maxsize=None)
def _element_set(m: Monoid) -> frozenset[HyperSub]:
    return frozenset(_elements(m))
