"""Learning stack: actor and critic networks, replay, training loop,
and the fixed baseline policies."""

from .actor import ActorNet
from .critic import AttentiveCritic
from .policies import (ActorPolicy, BASELINE_TAGS, GreedyPolicy,
                       LocalOnlyPolicy, RandomPolicy, RoundRobinPolicy,
                       baseline_policies)
from .replay import Batch, ReplayBuffer
from .trainer import (CriticHiddenTracker, Learner, TrainEpisode,
                      compute_targets, soft_update)

__all__ = [
    "ActorNet", "AttentiveCritic", "ActorPolicy", "BASELINE_TAGS",
    "GreedyPolicy", "LocalOnlyPolicy", "RandomPolicy", "RoundRobinPolicy",
    "baseline_policies", "Batch", "ReplayBuffer", "CriticHiddenTracker",
    "Learner", "TrainEpisode", "compute_targets", "soft_update",
]
