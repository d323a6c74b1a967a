# Application configuration settings
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    # Groebner engine
    BUDGET: int = 1_000_000  # reduction steps per basis computation

    # Local algebras
    LOCAL_POWER_START: int = 4
    LOCAL_POWER_MAX: int = 256

    # Chart search
    CHART_ATTEMPTS: int = 32  # coordinate hyperplanes count towards this
    CHART_SEED: int = 20240917
    CHART_EXTENSION_MAX: int = 3  # census forms retry over F_{q^k}, k <= this

    # Census
    BRUTE_FORCE_BUDGET: int = 10**8  # enumerated forms or jets
    EXHAUSTIVE_BUDGET: int = 10**7  # forms in an exhaustive density census
    CENSUS_CHUNK_SIZE: int = 256
    JOBS: int = 0  # 0 = all cores

    # Logging
    LOG_LEVEL: str = "WARNING"
    LOG_FORMAT: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    TOOL_VERSION: str = "0.4.0"

    model_config = SettingsConfigDict(
        env_prefix="DEFEKT_", env_file=".env", extra="ignore"
    )


settings = Settings()
