"""datahighlights: statistical highlight extraction and narration for tabular data.

Pipeline: CSV ingestion with dimension joins -> group-by pivot ->
archetype-property detectors -> structured highlight records -> JSON
document and template-based narrative.
"""

__version__ = "0.1.0"
