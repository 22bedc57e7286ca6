"""kindc: semantic compatibility checking and adapter generation for components."""

from kindc.bridge import Chain, SemanticBridge, build_bridge, find_chain
from kindc.canonical import CanonicalAsset, canonical_form, fully_equivalent, partially_equivalent
from kindc.codegen import AdapterPlan, emit_adapter, plan_adapter
from kindc.compat import CompatibilityResult, check_compatibility, semantically_equivalent
from kindc.contracts import implies, parse_contract
from kindc.kbformat import load, save
from kindc.kinding import ComponentKind, FeatureKind, check_subsumption, kind_component, \
    read_component
from kindc.sidl import ComponentDecl, MethodDecl, parse_component, parse_components, \
    parse_properties
from kindc.store import Assertion, Context, assert_, close, holds

__all__ = [
    "AdapterPlan", "Assertion", "CanonicalAsset", "Chain", "CompatibilityResult",
    "ComponentDecl", "ComponentKind", "Context", "FeatureKind", "MethodDecl", "SemanticBridge",
    "assert_", "build_bridge", "canonical_form", "check_compatibility", "check_subsumption",
    "close", "emit_adapter", "find_chain", "fully_equivalent", "holds", "implies",
    "kind_component", "load", "parse_component", "parse_components", "parse_contract",
    "parse_properties", "partially_equivalent", "plan_adapter", "read_component", "save",
    "semantically_equivalent",
]
