"""
LangGraph Orchestrator - Routes a verify request to the suite nodes.
Resolves the requested suite, fans out to the matching nodes and collects
their check records in a canonical order.
"""

from langgraph.graph import END, StateGraph

from config.config import VerifyConfig
from suites.codec_suite import run_codec_suite
from suites.gram_suite import run_gram_suite
from suites.recurrence_suite import run_recurrence_suite
from suites.roots_suite import run_roots_suite
from suites.sigmadelta_suite import run_sigmadelta_suite
from suites.spectral_suite import run_spectral_suite
from suites.vandermonde_suite import run_vandermonde_suite
from utils.errors import ConfigError
from utils.logger import get_logger

from .state import VerifyState

logger = get_logger(__name__)

SUITES = {
    "gram": run_gram_suite,
    "spectral": run_spectral_suite,
    "roots": run_roots_suite,
    "recurrence": run_recurrence_suite,
    "vandermonde": run_vandermonde_suite,
    "sigmadelta": run_sigmadelta_suite,
    "codec": run_codec_suite,
}
VALID_SUITES = list(SUITES) + ["all"]


def classify_suite(state: VerifyState):
    """Expands the requested suite name into the list of suites to run."""
    suite = state.get("suite", "all")
    if suite not in VALID_SUITES:
        raise ConfigError(f"unknown suite {suite!r}; expected one of {', '.join(VALID_SUITES)}")
    suites = list(SUITES) if suite == "all" else [suite]
    logger.info("verify: running %s", ", ".join(suites))
    return {"suites": suites}


def make_suite_node(name):
    run = SUITES[name]

    def node(state: VerifyState):
        cfg = state.get("config") or VerifyConfig()
        records = run(cfg)
        failed = sum(1 for rec in records if not rec["passed"])
        logger.info("suite %s: %d checks, %d failed", name, len(records), failed)
        return {"checks": records}

    return node


def finalize(state: VerifyState):
    order = {name: k for k, name in enumerate(SUITES)}
    report = sorted(state.get("checks", []), key=lambda rec: order[rec["suite"]])
    return {"report": report, "passed": bool(report) and all(rec["passed"] for rec in report)}


def create_graph():
    sg = StateGraph(VerifyState)

    sg.add_node("classify_suite", classify_suite)
    for name in SUITES:
        sg.add_node(f"{name}_node", make_suite_node(name))
    sg.add_node("finalize", finalize)

    def router(state: VerifyState):
        return [f"{name}_node" for name in state["suites"]]

    sg.add_conditional_edges(
        "classify_suite",
        router,
        {f"{name}_node": f"{name}_node" for name in SUITES},
    )

    for name in SUITES:
        sg.add_edge(f"{name}_node", "finalize")
    sg.add_edge("finalize", END)

    sg.set_entry_point("classify_suite")

    return sg.compile()


def run_verify(suite="all", cfg=None):
    """Runs the graph and returns (passed, ordered check records)."""
    result = create_graph().invoke({"suite": suite, "config": cfg or VerifyConfig(), "checks": []})
    return result["passed"], result["report"]
