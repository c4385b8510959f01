"""storysphere: compile 360-degree video features into branching narrative graphs.

The pipeline turns saliency maps, transcripts, loudness, and caption
embeddings into a serializable branch graph: branching points, a
diversity-optimized set of viewing-path branches per scene, narration
slots, and navigation cues. A separate interactive player consumes the
emitted document.
"""

from .config import CompileConfig
from .diversity import DiversityBreakdown, DiversityWeights
from .errors import (
    ConfigError,
    ContractError,
    DomainError,
    GraphValidationError,
    LoadError,
    ProviderError,
    StorysphereError,
)
from .geometry import Direction, ViewingPath, Viewport
from .graph import BranchGraph, jaccard_agreement
from .pipeline import GraphCompiler

__version__ = "0.1.0"

__all__ = [
    "BranchGraph",
    "CompileConfig",
    "ConfigError",
    "ContractError",
    "Direction",
    "DiversityBreakdown",
    "DiversityWeights",
    "DomainError",
    "GraphCompiler",
    "GraphValidationError",
    "LoadError",
    "ProviderError",
    "StorysphereError",
    "ViewingPath",
    "Viewport",
    "jaccard_agreement",
    "__version__",
]
