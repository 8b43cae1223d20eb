"""
This module contains the help texts of the filter commands.
"""

TRAIN_FILTERS_SUMMARY = 'Learn one filter bank per NNL block with the local Hebbian rule.'
TRAIN_FILTERS_DESCRIPTION = 'Reads the training images named in the [data] section and ' \
    'trains the filters of every NNL block of [architecture] without labels. Each bank ' \
    'is written as a .nnlf file; block i is seeded with seed + i.'

EXPORT_ATLAS_SUMMARY = 'Render a filter bank as a PNG atlas.'
EXPORT_ATLAS_DESCRIPTION = 'Every filter is shown as a W x W color tile, stretched ' \
    'linearly so that its smallest weight is black and its largest is white. Tiles are ' \
    'sorted by win count unless --order index is given.'

INSPECT_SUMMARY = 'Print the metadata of .nnlf and .nnlm files.'
INSPECT_DESCRIPTION = 'For filter banks, also prints win statistics and how many of ' \
    'the winning filters have converged to unit norm.'
