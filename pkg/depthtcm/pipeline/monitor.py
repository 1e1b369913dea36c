import psutil
import time


class Monitor:
	"""Process and system resource snapshots for long sweeps and evaluations."""

	def __init__(self, logger):
		self.__logger = logger
		self.__started = time.monotonic()
		self.__init_process()

	def __init_process(self):
		self.__process = psutil.Process()
		self.__logger.debug("self.__process is now %r" % (self.__process,))
		# First call so it does not return 0 on next call
		self.__process.cpu_percent()

	def get_cpu(self):
		average = psutil.cpu_percent()
		self.__logger.debug("cpu_percent() : %r" % (average,))
		thread_count = psutil.cpu_count(logical=True) or 1
		self.__logger.debug("cpu_count(logical=True) : %r" % (thread_count,))
		return dict(
			average=average,
			thread_count=thread_count,
			process=self.__get_process_cpu(average, thread_count),
		)

	def __get_process_cpu(self, average, thread_count):
		try:
			total_cpu = self.__process.cpu_percent()
		except psutil.NoSuchProcess:
			self.__logger.debug("No process found when calling cpu_percent() on %r" % (self.__process,))
			self.__init_process()
			total_cpu = self.__process.cpu_percent()
		return min(total_cpu / thread_count, average) if average else total_cpu / thread_count

	def get_memory(self):
		virtual_memory = psutil.virtual_memory()
		self.__logger.debug("virtual_memory() : %r" % (virtual_memory,))
		rss = self.__process.memory_info().rss
		self.__logger.debug("memory_info().rss : %r" % (rss,))
		return dict(
			rss=rss,
			total=virtual_memory.total,
			available=virtual_memory.available,
			percent=virtual_memory.percent,
		)

	def get_all_resources(self):
		return dict(
			cpu=self.get_cpu(),
			memory=self.get_memory(),
			elapsed=time.monotonic() - self.__started,
		)

	def summary(self):
		resources = self.get_all_resources()
		return "cpu %.1f%% (process %.1f%%), rss %.1f MiB, system memory %.1f%% used, %.1f s elapsed" % (
			resources["cpu"]["average"],
			resources["cpu"]["process"],
			resources["memory"]["rss"] / 2 ** 20,
			resources["memory"]["percent"],
			resources["elapsed"],
		)
