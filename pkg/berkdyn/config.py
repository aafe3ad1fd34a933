import os

from dotenv import load_dotenv
from pydantic import BaseModel, Field


load_dotenv()


class Settings(BaseModel):
    """Runtime settings read from the environment (and a local .env file)"""

    prime: int = Field(5, ge=2, description="Residue characteristic p")
    precision: int = Field(64, ge=1, description="Digits carried by p-adic expansions")
    seed: int = Field(0, ge=0, description="Seed for every randomized routine")
    enumeration_budget: int = Field(
        200000, ge=1, description="Max compositions enumerated by transfinite_diameter"
    )
    point_cap: int = Field(1024, ge=2, description="Cylinder tops kept per experiment level")
    boundary_sample_cap: int = Field(
        64, ge=1, description="Boundary samples used per Hoelder certificate"
    )
    log_level: str = Field("WARNING", description="Logging level for the CLI")

    @classmethod
    def from_env(cls) -> "Settings":
        env = {
            "prime": os.getenv("BERKDYN_PRIME"),
            "precision": os.getenv("BERKDYN_PRECISION"),
            "seed": os.getenv("BERKDYN_SEED"),
            "enumeration_budget": os.getenv("BERKDYN_ENUMERATION_BUDGET"),
            "point_cap": os.getenv("BERKDYN_POINT_CAP"),
            "boundary_sample_cap": os.getenv("BERKDYN_BOUNDARY_SAMPLE_CAP"),
            "log_level": os.getenv("BERKDYN_LOG_LEVEL"),
        }
        return cls(**{k: v for k, v in env.items() if v is not None})


settings = Settings.from_env()
