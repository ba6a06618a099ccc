from biqme.cli import run

run()
