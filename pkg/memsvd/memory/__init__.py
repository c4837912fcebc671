from .bank import MemoryBank
