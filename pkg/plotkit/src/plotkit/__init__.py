"""plotkit: render possim figures from emitted CSV datasets."""
from .figures import FIGURE_IDS, FigureSpec, RenderError, build_figure, render

__version__ = "0.1.0"
