"""lifegrid: lifelog exploration and retrieval engine.

Core layers: ingest (dataset parsing), segment (shot detection and uniform
sampling), descriptor (HistMap and criterion scores), featmap (zoomable
keyframe grids), query (boolean filter evaluation), dsl (textual query
language), simsearch (exact k-NN), engine (orchestration) and service (HTTP
API plus the timed task harness).
"""

__version__ = "0.1.0"
