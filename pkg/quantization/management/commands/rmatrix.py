"""
Management command driving the r-matrix engine on a model file.

Commands:
- check: CDYBE, zero weight, [Lambda, Lambda], rank and splittability
- cohomology: dimensions of the relative cohomology H^k(g, h)
- geometry: symplectic connection and curvature checks
- quantize / extract-f / residuals: Fedosov quantization and the twist F
- star: star product of two jets
- gauge / equivalence: gauge transforms of r and equivalences of F

The exit status is 0 exactly when every check of the run passed.
"""

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from quantization.exceptions import RMatrixError
from quantization.services import COMMANDS, ModelLoader, QuantizationPipeline, ReportBuilder


class Command(BaseCommand):
    help = 'Check, quantize and compare triangular dynamical r-matrices given in a model file'

    def add_arguments(self, parser):
        parser.add_argument(
            'subcommand',
            choices=COMMANDS,
            help='Operation to run',
        )
        parser.add_argument(
            'model',
            help='Path to a JSON model file',
        )
        parser.add_argument(
            '--degree',
            type=int,
            default=2,
            help='Cohomology degree k (default: 2)',
        )
        parser.add_argument(
            '--hbar',
            type=int,
            help='hbar order K (default: RMATRIX["DEFAULT_HBAR_ORDER"])',
        )
        parser.add_argument(
            '--weyl-curvature',
            help='JSON file of Weyl curvature terms, overriding the model file',
        )
        parser.add_argument('--f', help='First jet expression for star')
        parser.add_argument('--g', help='Second jet expression for star')
        parser.add_argument('--t', help='Equivalence element T, e.g. "1 + hbar*h^2"')
        parser.add_argument(
            '--base-point',
            help='Comma-separated base point l0 (default: from the model, else all ones)',
        )
        parser.add_argument(
            '--json',
            dest='json_path',
            help='Also write the machine-readable report to this path',
        )
        parser.add_argument(
            '--record',
            action='store_true',
            help='Store the run as a ModelRun',
        )
        parser.add_argument(
            '--pairing',
            action='store_true',
            help='extract-f: cross-check F against the jet pairing extraction',
        )
        parser.add_argument(
            '--verbose',
            action='store_true',
            help='Print every entry of large results',
        )

    def handle(self, *args, **options):
        command = options['subcommand']
        try:
            model = ModelLoader.load(options['model'])
            run_options = {
                'degree': options['degree'],
                'order': options['hbar'],
                'f': options['f'],
                'g': options['g'],
                't': options['t'],
                'pairing': options['pairing'],
            }
            if options['base_point'] is not None:
                run_options['base_point'] = ModelLoader.parse_base_point(options['base_point'], model)
            if options['weyl_curvature']:
                run_options['weyl_curvature'] = ModelLoader.load_weyl_curvature(
                    options['weyl_curvature'], model
                )
            report = QuantizationPipeline.run(command, model, **run_options)
        except RMatrixError as e:
            self.stderr.write(self.style.ERROR(f'✗ {type(e).__name__}: {e}'))
            diagnostics = getattr(e, 'diagnostics', None)
            if diagnostics:
                for axiom, violations in diagnostics.items():
                    if violations:
                        self.stderr.write(f'  {axiom}: {violations}')
            raise CommandError(str(e), returncode=1)

        self.show_report(report, options['verbose'])

        if options['json_path']:
            ReportBuilder.write_json(report, options['json_path'])
            self.stdout.write(f'Report written to {options["json_path"]}')

        if options['record'] or settings.RMATRIX['RECORD_RUNS']:
            recorded = {
                key: options[key]
                for key in ('model', 'degree', 'hbar', 'f', 'g', 't', 'base_point', 'weyl_curvature', 'pairing')
                if options.get(key) is not None
            }
            run = ReportBuilder.record(report, recorded)
            self.stdout.write(f'Recorded run {run.id}')

        if not report.passed:
            failed = [check.name for check in report.checks if not check.passed]
            raise CommandError(f'{len(failed)} check(s) failed: {", ".join(failed)}', returncode=1)

    def show_report(self, report, verbose=False):
        """Write the text form of a report with styles."""
        styles = {
            'title': self.style.SUCCESS,
            'section': self.style.HTTP_INFO,
            'success': self.style.SUCCESS,
            'error': self.style.ERROR,
        }
        for style, line in ReportBuilder.text_lines(report, verbose):
            if style == 'title':
                self.stdout.write(styles[style](line))
                self.stdout.write('=' * 50)
            elif style == 'section':
                self.stdout.write('')
                self.stdout.write(styles[style](line))
                self.stdout.write('-' * 30)
            elif style:
                self.stdout.write(styles[style](line))
            else:
                self.stdout.write(line)
        self.stdout.write(f'Runtime: {report.runtime_ms}ms')
