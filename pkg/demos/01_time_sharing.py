"""
Time sharing on a toy cluster
=============================

Two big tasks run in different halves of the day and one small task runs all
day. A timeline-blind planner sees three concurrent tasks and buys two
machines; a planner that knows the spans fits everything on one.
"""
from rightsize import (
    Instance,
    NodeType,
    Task,
    lower_bound,
    no_timeline_bound,
    solve_preset,
    verify_solution,
)

big = NodeType("big", (1.0, 1.0), 10.0)
small = NodeType("small", (0.6, 0.6), 6.5)
tasks = (
    Task("morning", (0.6, 0.6), 1, 2),
    Task("evening", (0.6, 0.6), 3, 4),
    Task("all-day", (0.4, 0.4), 1, 4),
)
inst = Instance(tasks, (big, small), horizon=4, dims=2)

# %% the four presets
for name in ("PenMap", "PenMapF", "LPMap", "LPMapF"):
    sol = solve_preset(inst, name)
    assert verify_solution(inst, sol).feasible
    print(f"{name:8s} cost {sol.cost:5.1f}  nodes {[n.node_type.id for n in sol.nodes]}")

# %% bounds with and without the timeline
print("LP lowerbound              ", lower_bound(inst))
print("bound if always active     ", no_timeline_bound(inst))
