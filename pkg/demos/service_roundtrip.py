"""The labeling service, driven in process.

Registers the vehicle hierarchy, resolves a batch of sessions in online mode
so the learner picks up the label skew, then drops the service object
mid-session and recovers everything from the event log, pending question
included. The HTTP layer is a thin JSON wrapper over these same calls.
"""

import tempfile

import numpy as np

from hiersearch import datasets
from hiersearch.generators import sample_targets
from hiersearch.policies import make_oracle
from hiersearch.service import SessionService

data_dir = tempfile.mkdtemp(prefix="hiersearch-demo-")
svc = SessionService(data_dir=data_dir)
hid = svc.add_hierarchy(datasets.VEHICLE_EDGES)["hierarchy_id"]
h = svc.hierarchies[hid].h

# Label 200 simulated objects drawn from the real skew, learner on.
p = datasets.vehicle_real_weights(h)
targets = sample_targets(p, 200, np.random.default_rng(0))
for t in targets:
    oracle = make_oracle(h, int(t))
    view = svc.create_session(hid, policy="greedy_tree", mode="online")
    while view["status"] == "open":
        q = view["question"]
        view = svc.post_answer(view["session_id"], q["ordinal"],
                               oracle(h.id_of(q["node"])))

stats = svc.hierarchy_stats(hid, top_k=3)
print(f"resolved sessions: {stats['sessions']['resolved']}")
print(f"rolling mean questions: {stats['rolling_mean_questions']:.2f}")
print("learned top labels:")
for label, prob in stats["top"]:
    print(f"  {label:9s} p={prob:.3f}")

# Open one more session, answer once, then lose the process.
view = svc.create_session(hid, policy="greedy_tree", mode="online")
sid = view["session_id"]
q1 = view["question"]
view = svc.post_answer(sid, q1["ordinal"], False)
pending = view["question"]
print(f"\nopen session {sid}: answered {q1['node']!r}=no,"
      f" now pending {pending['node']!r} #{pending['ordinal']}")
del svc  # no close(): simulates the process dying

revived = SessionService(data_dir=data_dir)
again = revived.get_session(sid)["question"]
print(f"after restart from {data_dir}:"
      f" pending {again['node']!r} #{again['ordinal']}")
assert again == pending
revived.close()
print("recovered state matches, answering can continue.")
