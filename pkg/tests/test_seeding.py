import numpy as np

from paircomp.seeding import derive_seed, make_generator, run_seed


class TestSeedDerivation:
    def test_counter_scheme_is_frozen(self):
        # these values pin the documented derivation scheme; a change here
        # breaks reproducibility of every recorded experiment
        assert derive_seed(0) == 15793235383387715774
        assert derive_seed(1234, 0) == 4985326416798289662
        assert derive_seed(1234, 1, 0) == 16274685030245454228
        assert derive_seed(1234, 1, 7) == 10804711530192008396
        assert run_seed(99, 0, 0) == 493536389902028131
        assert run_seed(99, 1, 3) == 3599309446377083542

    def test_paths_are_disjoint(self):
        seeds = {derive_seed(7, stream, k)
                 for stream in range(5) for k in range(200)}
        assert len(seeds) == 5 * 200

    def test_root_changes_everything(self):
        a = [derive_seed(1, 1, k) for k in range(50)]
        b = [derive_seed(2, 1, k) for k in range(50)]
        assert not set(a) & set(b)

    def test_generator_is_deterministic(self):
        g1 = make_generator(42)
        g2 = make_generator(42)
        assert g1.standard_normal(8).tolist() == g2.standard_normal(8).tolist()

    def test_generator_is_philox(self):
        assert type(make_generator(0).bit_generator).__name__ == "Philox"

    def test_extension_does_not_perturb_earlier_instances(self):
        # seeds are positional: adding instances appends new seeds only
        first_ten = [derive_seed(5, 1, k) for k in range(10)]
        first_twenty = [derive_seed(5, 1, k) for k in range(20)]
        assert first_twenty[:10] == first_ten
