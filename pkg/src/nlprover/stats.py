"""Counters accumulated over one proof search."""

from dataclasses import dataclass, field


def _call_counters() -> dict[str, int]:
    return {"embed": 0, "generate": 0, "entail_one": 0, "entail_two": 0}


@dataclass
class SearchStats:
    """Per-search counters; provider_calls counts logical batch calls
    (a warm cache serves them without network traffic)."""

    goals_expanded: int = 0
    provider_calls: dict[str, int] = field(default_factory=_call_counters)
    candidates_filtered: int = 0
    branches_pruned: int = 0
    provider_errors: int = 0
    cycles_blocked: int = 0
    duplicates_removed: int = 0
    template_mismatches: int = 0
    self_decompositions_dropped: int = 0
    invalid_candidates: int = 0

    def as_dict(self) -> dict:
        return {
            "goals_expanded": self.goals_expanded,
            "provider_calls": dict(self.provider_calls),
            "candidates_filtered": self.candidates_filtered,
            "branches_pruned": self.branches_pruned,
            "provider_errors": self.provider_errors,
            "cycles_blocked": self.cycles_blocked,
            "duplicates_removed": self.duplicates_removed,
            "template_mismatches": self.template_mismatches,
            "self_decompositions_dropped": self.self_decompositions_dropped,
            "invalid_candidates": self.invalid_candidates,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "SearchStats":
        stats = cls()
        stats.goals_expanded = int(doc.get("goals_expanded", 0))
        stats.provider_calls.update(doc.get("provider_calls", {}))
        stats.candidates_filtered = int(doc.get("candidates_filtered", 0))
        stats.branches_pruned = int(doc.get("branches_pruned", 0))
        stats.provider_errors = int(doc.get("provider_errors", 0))
        stats.cycles_blocked = int(doc.get("cycles_blocked", 0))
        stats.duplicates_removed = int(doc.get("duplicates_removed", 0))
        stats.template_mismatches = int(doc.get("template_mismatches", 0))
        stats.self_decompositions_dropped = int(doc.get("self_decompositions_dropped", 0))
        stats.invalid_candidates = int(doc.get("invalid_candidates", 0))
        return stats
