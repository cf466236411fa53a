"""Hybrid-animal breeding platform: genomes over animal categories, an
explore/exploit discovery sampler, isolated per-world curation ecologies,
citizen-science annotation statistics, a pluggable image backend, and an
event-sourced service with a simulation harness.
"""

from . import errors
from .catalogue import (
    MORPHOLOGY_FEATURES,
    RATING_METRICS,
    AnnotationRecord,
    AnnotationStore,
    GroupComparison,
    contains_dog,
    contains_insect,
    group_compare,
    mean_rating,
    morphology_consensus,
    record_annotation,
    validate_annotation,
    welch_t_test,
    world_ratings,
)
from .ecology import (
    DEFAULT_DECAY,
    DEFAULT_FEED_AMOUNT,
    DEFAULT_INITIAL_ENERGY,
    DEFAULT_SEED_SET_SIZE,
    LAYOUT_FEED_LINEAR,
    LAYOUT_SPATIAL,
    LAYOUT_VARIANTS,
    EnergyState,
    World,
    as_energy,
    assign_user,
    category_entropy,
    create_world,
    feed,
    tick,
    update_leaderboard,
)
from .generator import (
    DEFAULT_RESOLUTION,
    Capability,
    GeneratorBackend,
    HttpBackend,
    ImageRef,
    ImageStore,
    MockBackend,
    RenderCache,
    RenderRequest,
    blend_palette,
    category_palette,
    encode_png,
    mock_render,
    png_dimensions,
    render_cached,
)
from .genome import (
    GanimalId,
    Generation,
    Genome,
    SpaceCounts,
    breed_pair,
    breed_quad,
    canonical_id,
    canonical_serialization,
    count_space,
    default_noise_rule,
    make_g0,
    mean_truncation_rule,
)
from .rng import RngState, derive_seed
from .sampler import (
    CHARACTERISTICS,
    DEFAULT_G0_TRUNCATION,
    DEFAULT_LEADERBOARD_K,
    PROCEDURE_LEADERBOARD,
    PROCEDURE_RECIPE,
    PROCEDURE_STRATIFIED,
    PROCEDURE_UNIFORM,
    DiscoveryResult,
    PolicyMix,
    choose_procedure,
    next_discovery,
    sample_leaderboard,
    sample_recipe_pair,
    sample_stratified_pair,
    sample_uniform_pair,
)
from .taxonomy import (
    CORE_NAMES,
    EXPECTED_CATEGORY_COUNT,
    EXPECTED_DOG_COUNT,
    Category,
    CoreDefinition,
    Taxonomy,
    bundled_data_path,
    categories_in_core,
    load_taxonomy,
    serialize_taxonomy,
)

__version__ = "0.1.0"
