"""Lint packed-class hierarchies: coercion coherence, joins and unification hints."""

from .coercions import (
    ClassDecl,
    CoercionDecl,
    CoercionGraph,
    CompositionFailure,
    DuplicateCoercion,
    InheritancePath,
    UnknownClass,
    check_uniform,
    compose_path,
)
from .diagnostics import Diagnostic
from .document import HierarchyDocument, load_document, parse_document
from .fixtures import load_fixture
from .hierarchy import (
    TOP,
    AmbiguityFailure,
    Hierarchy,
    JoinAssertion,
    NotWellFormed,
    acyclicity_check,
    check_well_formed,
    generate_assertions,
    join,
    leq,
    mcs,
)
from .inference import (
    CanonicalInstanceDecl,
    ConcreteCollision,
    HintTable,
    NoHint,
    Solved,
    check_instance_coherence,
    check_join_assertion,
    declare_canonical,
    resolve,
    verify_predictability,
)
from .lint import LintOptions, LintReport, analyze, emit_assertion_script, run_lint
from .terms import DefinitionEnv, alpha_equal, convertible, match_first_order, reduce

__version__ = "0.1.0"
