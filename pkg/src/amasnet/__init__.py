"""Asynchronous multi-agent systems as 1-safe labelled Petri nets.

Agents are deterministic labelled transition systems. They can be composed
directly (interleaving with synchronization on shared labels) or turned into
nets and fused on shared transitions; :mod:`amasnet.liveness` decides which
fused transitions can ever fire while composing as few agents as possible.
"""

from .compose import GlobalTransition, Subsystem, compose_nets, global_net, project_transition, subsystem, verify_proposition1
from .liveness import MinimalPath, check_1liveness, comp_min_paths, find_dead_transitions, select_path
from .mas import Amas, Lts, ModelError, agents_sharing, compose_iis, iso_check, protocol, reachable_prune
from .modelfile import load_model, parse_model, render_model
from .net import LabelledNet, MarkingGraph, check_one_safe, classify_pair, enabled, fire, is_one_live_bruteforce, marking_graph
from .synthesis import agent_to_net, check_essp, check_ssp, enumerate_regions, is_region, minimal_regions, synthesize

__version__ = "0.1.0"
