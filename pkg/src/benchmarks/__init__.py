"""
Benchmark generators: capacitated facility location, stochastic server location,
the Schultz investment problem and a small mixed-integer recourse example.
"""

from .cflp import cflp_scenario, cflp_scenarios, gen_cflp
from .sslp import gen_sslp, sslp_scenario, sslp_scenarios
from .invp import gen_invp, invp_scenario, invp_scenarios, load_invp_data
from .mixed_recourse import gen_mixed_recourse_example, mixed_recourse_scenarios
from .generator import FAMILIES, InstanceSpec, generate_instance, instance_name, sample_scenarios

__all__ = [
    "cflp_scenario",
    "cflp_scenarios",
    "gen_cflp",
    "gen_sslp",
    "sslp_scenario",
    "sslp_scenarios",
    "gen_invp",
    "invp_scenario",
    "invp_scenarios",
    "load_invp_data",
    "gen_mixed_recourse_example",
    "mixed_recourse_scenarios",
    "FAMILIES",
    "InstanceSpec",
    "generate_instance",
    "instance_name",
    "sample_scenarios",
]
