"""
memsvd Head Registry
Pluggable memory-interaction heads (attention, MeMSVD, oMeMSVD) for benchmarks
"""

from typing import Any, Dict, List, Optional, Type

from loguru import logger


class HeadRegistry:
    """
    Central registry for memory-interaction heads.
    Benchmarks instantiate heads by name so new mechanisms plug in without
    touching the runners.
    """

    _heads: Dict[str, Type] = {}

    @classmethod
    def register(cls, name: str):
        """
        Decorator to register a head class.

        Usage:
            @HeadRegistry.register("memsvd")
            class MemSVDHead(BaseMemoryHead):
                ...
        """

        def decorator(head_class: Type) -> Type:
            cls._heads[name] = head_class
            head_class.registry_name = name
            logger.debug(f"Registered memory head: {name}")
            return head_class

        return decorator

    @classmethod
    def create(cls, name: str, **kwargs) -> Any:
        """
        Instantiate a registered head.

        Raises:
            KeyError: unknown head name
        """
        if name not in cls._heads:
            raise KeyError(
                f"Unknown memory head '{name}', registered: {sorted(cls._heads)}"
            )
        head = cls._heads[name](**kwargs)
        logger.debug(f"Instantiated memory head: {name}")
        return head

    @classmethod
    def create_many(cls, names: List[str], **kwargs) -> List[Any]:
        """Instantiate several heads sharing the same keyword arguments"""
        return [cls.create(name, **kwargs) for name in names]

    @classmethod
    def get(cls, name: str) -> Optional[Type]:
        return cls._heads.get(name)

    @classmethod
    def list_registered(cls) -> List[str]:
        return list(cls._heads.keys())
