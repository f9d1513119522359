from .builders import (
    DOGWHISTLE_NAMES,
    DOGWHISTLE_RANGE,
    DOGWHISTLE_TWEETS,
    EXPLANATION_TEXT,
    FIXED_EXAMPLES,
    LEFT_RIGHT,
    SPECTRA,
    AnchoredExchange,
    AnchorWindow,
    Explanation,
    Mutter,
    Parent,
    PlatformMode,
    Spectrum,
    VignetteSpec,
    WhistleVariant,
    all_vignettes,
    build_dogwhistle_prompt,
    build_ideal_point_prompt,
    build_platform_prompts,
    build_tweet_prompt,
    build_vignette_prompt,
    dogwhistle_body,
    extract_platform,
    permute,
)
from .templates import Family, PromptTemplate, drifted_templates, load_template

__all__ = [
    "DOGWHISTLE_NAMES", "DOGWHISTLE_RANGE", "DOGWHISTLE_TWEETS", "EXPLANATION_TEXT",
    "FIXED_EXAMPLES", "LEFT_RIGHT", "SPECTRA", "AnchoredExchange", "AnchorWindow",
    "Explanation", "Family", "Mutter", "Parent", "PlatformMode", "PromptTemplate",
    "Spectrum", "VignetteSpec", "WhistleVariant", "all_vignettes", "build_dogwhistle_prompt",
    "build_ideal_point_prompt", "build_platform_prompts", "build_tweet_prompt",
    "build_vignette_prompt", "dogwhistle_body", "drifted_templates", "extract_platform",
    "load_template", "permute",
]
