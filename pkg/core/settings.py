from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    # === Усечение и допуски ===
    ORDER: int = Field(default=128, ge=8)
    RANK_TOL: float = Field(default=1e-8, gt=0, lt=1)
    TOL: float = Field(default=1e-8, gt=0, lt=1)
    ORTHO_TOL: float = Field(default=1e-10, gt=0, lt=1)
    GUARD_TOL: float = Field(default=1e-6, gt=0, lt=1)
    GRID_SIZE: int = Field(default=512, ge=64)

    # === Прогон проверок ===
    THREADS: int = Field(default=4, ge=1)
    SEED: int = 0

    # === Логирование ===
    LOG_LEVEL: str = 'INFO'
    LOG_FILE: str | None = None

    model_config = SettingsConfigDict(
        env_prefix='HARDY_LAB_',
        env_file='.env',
        env_file_encoding='utf-8',
        extra='ignore',
        case_sensitive=False,  # В .env можно использовать как верхний, так и нижний регистр
    )

    def tolerances(self) -> dict[str, float]:
        """Допуски, которые попадают в каждый сертификат."""
        return {
            'rank_tol': self.RANK_TOL,
            'tol': self.TOL,
            'ortho_tol': self.ORTHO_TOL,
            'guard_tol': self.GUARD_TOL,
        }


# Singleton - Единственный экземпляр настроек на всё приложение
settings = Settings()
