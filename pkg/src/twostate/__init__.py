"""twostate: ABL probabilities, pre- and post-selected ensembles and counterfactual checks."""

from twostate.counterfactual import consistency_condition  # noqa
from twostate.counterfactual import counterfactual_verdict  # noqa
from twostate.counterfactual import special_case_detector  # noqa
from twostate.counterfactual import weight_condition  # noqa
from twostate.ensembles import EnsembleMixture  # noqa
from twostate.ensembles import born_probability  # noqa
from twostate.ensembles import eta_weight  # noqa
from twostate.ensembles import mixture_M  # noqa
from twostate.ensembles import mixture_Mprime  # noqa
from twostate.ensembles import ss_corrected_total  # noqa
from twostate.ensembles import ss_counterfactual_total  # noqa
from twostate.ensembles import ss_discrepancy  # noqa
from twostate.hilbert import BlochDirection  # noqa
from twostate.hilbert import Projector  # noqa
from twostate.hilbert import SpectralMeasurement  # noqa
from twostate.hilbert import StateVector  # noqa
from twostate.hilbert import inner_product  # noqa
from twostate.hilbert import spin_measurement  # noqa
from twostate.hilbert import spin_state  # noqa
from twostate.montecarlo import fixed_systems  # noqa
from twostate.montecarlo import paired_worlds  # noqa
from twostate.montecarlo import simulate_runs  # noqa
from twostate.scenarios import run_scenario  # noqa
from twostate.tsvf import EvolutionSpec  # noqa
from twostate.tsvf import TwoStateVector  # noqa
from twostate.tsvf import VanishingDenominatorError  # noqa
from twostate.tsvf import abl_distribution  # noqa
from twostate.tsvf import abl_probability  # noqa
from twostate.tsvf import evolve  # noqa
from twostate.utils import ExportCsv  # noqa
from twostate.utils import ExportJson  # noqa
from twostate.utils import ExportText  # noqa
from twostate.utils import ScenarioReport  # noqa
from twostate.version import version as __version__  # noqa
