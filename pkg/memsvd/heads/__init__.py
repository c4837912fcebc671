# Memory-interaction heads; importing registers them with HeadRegistry
from .base import BaseMemoryHead
from .attention_head import AttentionHead
from .memsvd_head import MemSVDHead, OnlineMemSVDHead
