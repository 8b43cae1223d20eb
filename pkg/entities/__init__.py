from .dataset import ImageDataset, ShadowSpec
from .filter_bank import ConvergenceReport, FilterBank, HebbianConfig
from .layers import Block, BlockArchitecture, BlockType, Classifier, ConvLayer, MaxPoolLayer, NnlConvLayer
from .patches import PatchBatch, PatchSource
from .report import EvalReport, TransferReport
from .run_config import BlockConfig, RunConfig
from .training import AdamState, EpochLog, LrSchedule, ScheduleKind, SupervisedConfig
