from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    # LP engine
    feasibility_tol: float = 1e-7
    optimality_tol: float = 1e-6
    pivot_tol: float = 1e-9
    breakdown_tol: float = 1e-12
    dense_nonzero_limit: int = 2000
    degenerate_pivot_factor: int = 50
    max_simplex_iterations: int = 0  # 0 means derive from problem size

    # Branch and bound
    integrality_tol: float = 1e-6
    mip_gap_tol: float = 1e-9
    node_limit: int = 100000
    mip_time_limit_s: float = 600.0

    # Experiment defaults (desk scale)
    ef_time_limit_s: float = 60.0
    n_samples: int = 1000
    max_scenarios: int = 30
    n_jobs: int = 1

    # Training defaults
    epochs: int = 200
    batch_size: int = 32
    learning_rate: float = 1e-3
    validation_fraction: float = 0.2

    # Convexity probes
    convexity_rel_tol: float = 1e-6
    convexity_abs_tol: float = 1e-8

    artifacts_dir: str = "./artifacts"
    show_progress: bool = True
    log_level: str = "INFO"

    class Config:
        env_file = ".env"
        env_prefix = "SURROGATE_"
        case_sensitive = False


settings = Settings()
