"""
This module contains the help texts of the supervised training commands.
"""

TRAIN_CLASSIFIER_SUMMARY = 'Train the top layer of an NNL network on frozen filters.'
TRAIN_CLASSIFIER_DESCRIPTION = 'Builds the network of [architecture] from the given ' \
    '.nnlf banks and trains only the softmax classifier with Adam, following the ' \
    '[classifier] schedule. Writes a .nnlm model and a CSV log with one row per epoch.'

TRAIN_E2E_SUMMARY = 'Train a CONV baseline end to end.'
TRAIN_E2E_DESCRIPTION = 'Builds a network of standard convolutional blocks with the ' \
    'shapes of [architecture] and trains every parameter by backpropagation. Writes a ' \
    '.nnlm model and a CSV log with one row per epoch.'
