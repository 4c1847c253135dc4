from .commands import PacklabCLI, run
