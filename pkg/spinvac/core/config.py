# spinvac/core/config.py
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """
    Process-level settings loaded from environment variables.

    This class uses Pydantic's BaseSettings to automatically load configuration
    from environment variables (prefixed with ``SPINVAC_``) or a .env file.
    """
    OUTPUT_DIR: str = "runs"
    DIMENSION_CAP: int = 2 ** 16
    LOG_LEVEL: str = "INFO"

    class Config:
        env_file = ".env"
        env_prefix = "SPINVAC_"
        case_sensitive = True
        extra = "ignore"


def get_settings() -> Settings:
    """Build a fresh Settings instance so environment overrides apply per call."""
    return Settings()
