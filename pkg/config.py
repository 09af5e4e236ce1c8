import os

from dotenv import load_dotenv

# Load environment variables
load_dotenv()


def _int_env(name, default):
    value = os.getenv(name)
    return int(value) if value not in (None, '') else default


class Config:
    """Settings shared by the HTTP service and the command line"""

    GAM_WORKERS = _int_env('GAM_WORKERS', 1)
    GAM_CHUNK_SIZE = _int_env('GAM_CHUNK_SIZE', 1024)
    GAM_LOG_LEVEL = os.getenv('GAM_LOG_LEVEL', 'INFO')
    GAM_MAX_NODES = _int_env('GAM_MAX_NODES', 50000)
    GAM_PORT = _int_env('GAM_PORT', 6969)
    GAM_CORS_ORIGINS = [
        origin.strip()
        for origin in os.getenv('GAM_CORS_ORIGINS', 'http://127.0.0.1:5173,http://localhost:5173').split(',')
        if origin.strip()
    ]
    JSON_SORT_KEYS = False
