"""
Configuration management using environment variables
"""

import os
from pathlib import Path

from dotenv import load_dotenv

# Load .env file from project root
env_path = Path(__file__).parent.parent.parent / ".env"
load_dotenv(dotenv_path=env_path)


class Settings:
    """Application settings loaded from environment variables"""

    def __init__(self):
        # Logging
        self.log_level: str = os.getenv("THFT_LOG_LEVEL", "INFO")

        # Execution
        self.jobs: int = int(os.getenv("THFT_JOBS", "1"))
        self.output_dir: str = os.getenv("THFT_OUTPUT_DIR", "reports")
        self.chunk_size: int = int(os.getenv("THFT_CHUNK_SIZE", "200000"))

        # Scale quadrature over [eps, L]^k
        self.quad_rtol: float = float(os.getenv("THFT_QUAD_RTOL", "1e-8"))
        self.quad_atol: float = float(os.getenv("THFT_QUAD_ATOL", "1e-14"))
        self.quad_max_depth: int = int(os.getenv("THFT_QUAD_MAX_DEPTH", "6"))

        # One-dimensional kernel quadrature
        self.kernel_rtol: float = float(os.getenv("THFT_KERNEL_RTOL", "1e-9"))

        # Ladders
        self.ladder_rungs: int = int(os.getenv("THFT_LADDER_RUNGS", "12"))
        # eps_j = L 2^-j starts at j = first rung
        self.ladder_first_rung: int = int(os.getenv("THFT_LADDER_FIRST_RUNG", "5"))
        self.ladder_tolerance: float = float(
            os.getenv("THFT_LADDER_TOLERANCE", "1e-4")
        )
        self.outer_rungs: int = int(os.getenv("THFT_OUTER_RUNGS", "6"))
        self.outer_tolerance: float = float(
            os.getenv("THFT_OUTER_TOLERANCE", "1e-3")
        )

        # Test inputs
        self.poly_degree_cap: int = int(os.getenv("THFT_POLY_DEGREE_CAP", "8"))

        # Monte-Carlo oracles
        self.mc_samples: int = int(os.getenv("THFT_MC_SAMPLES", "1000000"))

        self.project_name: str = "THFT Weight Calculator"
        self.version: str = "1.0.0"


# Global settings instance
settings = Settings()
