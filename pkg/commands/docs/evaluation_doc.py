"""
This module contains the help texts of the evaluation commands.
"""

EVAL_SUMMARY = 'Report top-1 and top-5 errors of one or more models.'
EVAL_DESCRIPTION = 'Evaluates on the test set of the config, or on --data files. ' \
    '--shadow cols=25,factor=0.3 dims the 25 leftmost columns of every image to 30% ' \
    'and prints raw and shadowed errors side by side; --scale multiplies every pixel.'
SHADOW_HELP = 'Dim the leading columns, given as cols=<n>,factor=<I>.'
SCALE_HELP = 'Uniform illumination factor applied to every pixel.'

TRANSFER_SUMMARY = 'Retrain the top layer on another dataset over imported filters.'
TRANSFER_DESCRIPTION = 'The filters stay frozen; only the classifier is trained on the ' \
    'dataset of the config. Repeated with seeds seed, seed + 1, ... and reported as ' \
    'mean and standard deviation of the top-1 error.'
