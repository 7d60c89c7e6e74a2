"""Exception types shared across the package."""


class HierSearchError(Exception):
    """Base class for library errors. `code` feeds structured error bodies."""

    code = "internal_error"


class EmptyInput(HierSearchError):
    code = "empty_input"


class CycleDetected(HierSearchError):
    code = "cycle_detected"

    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("cycle detected: " + " -> ".join(self.cycle))


class UnknownNode(HierSearchError):
    code = "unknown_node"


class NotATree(HierSearchError):
    code = "not_a_tree"


class NodeNotLive(HierSearchError):
    code = "node_not_live"


class AllZero(HierSearchError):
    code = "all_zero"


class BadParameter(HierSearchError):
    code = "bad_parameter"


class AlreadyResolved(HierSearchError):
    code = "already_resolved"


class PolicyMismatch(HierSearchError):
    code = "policy_mismatch"


class StaleQuestion(HierSearchError):
    code = "stale_question"


class TooLarge(HierSearchError):
    code = "too_large"


class LeafMismatch(HierSearchError):
    code = "leaf_mismatch"


class UnknownHierarchy(HierSearchError):
    code = "unknown_hierarchy"


class UnknownSession(HierSearchError):
    code = "unknown_session"


class SessionClosed(HierSearchError):
    code = "session_closed"


class OrdinalMismatch(HierSearchError):
    code = "ordinal_mismatch"


class BadDataDir(HierSearchError):
    code = "bad_data_dir"
