"""Application configuration management."""

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Settings loaded from environment variables (prefix TNPROB_)."""

    # Application
    app_name: str = "tnprob"
    log_level: str = "INFO"

    # Contraction engine
    budget: int = 100_000_000  # max elements of any intermediate tensor
    copy_rewrite_min_elements: int = 256  # order >= 3 copy tensors this large become index merges

    # Numerical guards
    gauge_max_condition: float = 1e12
    negative_tolerance: float = 1e-14
    zero_support: float = 1e-12

    # Training
    torch_threads: int = 1

    model_config = SettingsConfigDict(
        env_prefix="TNPROB_", env_file=".env", env_file_encoding="utf-8", extra="ignore"
    )


# Global settings instance
settings = Settings()
