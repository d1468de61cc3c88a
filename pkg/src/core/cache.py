"""
Cache - Caching av färdiga sökkataloger.
"""

import hashlib
import json
from pathlib import Path
from typing import Any, Dict, Optional

from .logger import get_logger
from .settings import MEMORY_CACHE_ITEMS, TOOL_VERSION

logger = get_logger()


class CatalogCache:
    """Hanterar caching av sökkataloger på disk och i minnet."""

    def __init__(self, cache_dir: str = "cache"):
        self.cache_dir = Path(cache_dir)
        self.cache_dir.mkdir(parents=True, exist_ok=True)

        # In-memory cache för snabb åtkomst
        self._catalog_cache: Dict[str, Dict[str, Any]] = {}
        self._max_memory_items = MEMORY_CACHE_ITEMS

    def _get_cache_key(self, params: Dict[str, Any]) -> str:
        """Skapar en cache-nyckel från sökparametrarna och verktygsversionen."""
        key_data = json.dumps({"params": params, "tool": TOOL_VERSION}, sort_keys=True)
        return hashlib.md5(key_data.encode()).hexdigest()

    def get_catalog(self, params: Dict[str, Any]) -> Optional[Dict[str, Any]]:
        """Hämtar en cachad katalog."""
        cache_key = self._get_cache_key(params)

        # Kolla in-memory cache först
        if cache_key in self._catalog_cache:
            logger.debug(f"Cache hit (memory): {cache_key}")
            return self._catalog_cache[cache_key]

        # Kolla disk cache
        cache_file = self.cache_dir / f"catalog_{cache_key}.json"
        if cache_file.exists():
            try:
                with open(cache_file, "r", encoding="utf-8") as f:
                    catalog = json.load(f)
                if len(self._catalog_cache) < self._max_memory_items:
                    self._catalog_cache[cache_key] = catalog
                logger.debug(f"Cache hit (disk): {cache_file.name}")
                return catalog
            except (OSError, json.JSONDecodeError) as e:
                logger.warning(f"Fel vid laddning av cache: {e}")
                # Ta bort korrupt cache-fil
                cache_file.unlink()

        return None

    def cache_catalog(self, params: Dict[str, Any], catalog: Dict[str, Any]) -> None:
        """Cachar en katalog."""
        cache_key = self._get_cache_key(params)

        if len(self._catalog_cache) >= self._max_memory_items:
            # Ta bort äldsta (FIFO)
            oldest_key = next(iter(self._catalog_cache))
            del self._catalog_cache[oldest_key]
        self._catalog_cache[cache_key] = catalog

        cache_file = self.cache_dir / f"catalog_{cache_key}.json"
        try:
            with open(cache_file, "w", encoding="utf-8") as f:
                json.dump(catalog, f, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False)
            logger.debug(f"Cachad katalog: {cache_file.name}")
        except (OSError, ValueError) as e:
            logger.warning(f"Fel vid caching av katalog: {e}")

    def clear_cache(self) -> None:
        """Rensar all cache."""
        self._catalog_cache.clear()

        for cache_file in self.cache_dir.glob("catalog_*.json"):
            try:
                cache_file.unlink()
            except OSError as e:
                logger.warning(f"Fel vid borttagning av cache-fil {cache_file}: {e}")

        logger.info("Cache rensad")


# Global cache-instans per katalog
_caches: Dict[str, CatalogCache] = {}


def get_cache(cache_dir: str = "cache") -> CatalogCache:
    """Hämtar cache-instansen för en katalog."""
    if cache_dir not in _caches:
        _caches[cache_dir] = CatalogCache(cache_dir)
    return _caches[cache_dir]
