"""
LangGraph State - Defines data structure passed between graph nodes.
Tracks the requested suite, the routed suite list and the check records.
"""

import operator
from typing import Annotated, Any, Dict, List, TypedDict


class VerifyState(TypedDict, total=False):
    suite: str
    suites: List[str]
    config: Any
    # suite nodes may run in the same step; their records are concatenated
    checks: Annotated[List[Dict[str, Any]], operator.add]
    report: List[Dict[str, Any]]
    passed: bool
