from pathlib import Path
import os
import dj_database_url
from dotenv import load_dotenv

# Build paths inside the project
BASE_DIR = Path(__file__).resolve().parent.parent
load_dotenv(BASE_DIR / '.env')

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.getenv('SECRET_KEY', 'django-insecure-mertens-lab-local-only')

DEBUG = os.getenv('DEBUG', 'False').lower() in ('1', 'true', 't', 'yes', 'y')

ALLOWED_HOSTS = []

# Application definition
INSTALLED_APPS = [
    'django.contrib.auth',
    'django.contrib.contenttypes',
    'rest_framework',
    'MertensLab.apps.MertenslabConfig',
]

# Database configuration
# Audit runs are stored only when `audit --save` is used; SQLite is enough.
DATABASES = {
    'default': dj_database_url.config(
        default=os.environ.get('DATABASE_URL', f"sqlite:///{BASE_DIR / 'db.sqlite3'}"),
        conn_max_age=600,
    )
}

# Default primary key field type
DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# Internationalization
LANGUAGE_CODE = 'en-us'
TIME_ZONE = os.getenv('TIME_ZONE', 'UTC')
USE_I18N = False
USE_TZ = True

# Logging
LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO').upper()

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'lab': {
            'format': '%(asctime)s %(levelname)s %(name)s %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'lab',
        },
    },
    'loggers': {
        'MertensLab': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
    },
}

# =========================
# Mertens lab computation knobs
# =========================
# Every value can be overridden per run with a `--config` file or a flag.

LAB_ARTIFACT_VERSION = '1.0.0'

# Integers sieved per segment; the sieve refuses segments above the cap.
LAB_SEGMENT_SIZE = int(os.getenv('LAB_SEGMENT_SIZE', str(2 ** 20)))
LAB_MAX_SEGMENT_SIZE = int(os.getenv('LAB_MAX_SEGMENT_SIZE', str(2 ** 24)))

# Default worker processes for sieving and range scans.
LAB_WORKERS = int(os.getenv('LAB_WORKERS', '1'))

# Largest n a full sieve may reach.
LAB_MAX_N = int(os.getenv('LAB_MAX_N', str(10 ** 10)))

LAB_AUDIT_N_MAX = int(os.getenv('LAB_AUDIT_N_MAX', str(10 ** 6)))

# Ratio probes at or below this n are re-evaluated with mpmath in the audit.
LAB_REEVAL_MAX_N = int(os.getenv('LAB_REEVAL_MAX_N', str(10 ** 4)))
